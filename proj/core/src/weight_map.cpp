#include "ovq/weight_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>

#include "ovq/errors.hpp"
#include "ovq/parallel.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight-map cache I/O assumes a little-endian host");

namespace ovq {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

// Largest great-circle angle between a viewport center and any direction in
// its box: acos(cos30 * cos30) = 41.41 degrees. Row pairs further apart in
// latitude cannot interact.
constexpr double kMaxMemberDistanceDeg = 41.5;

// Circular sliding-window maximum: out[i] = max of values[(i)..(i+window-1)]
// (indices mod n). Monotone deque, O(n).
void circular_window_max(const std::vector<double>& values, int window,
                         std::vector<double>& out) {
  const int n = static_cast<int>(values.size());
  out.assign(n, 0.0);
  std::deque<int> deq;
  for (int i = 0; i < n + window - 1; ++i) {
    const double v = values[i % n];
    while (!deq.empty() && values[deq.back() % n] <= v) deq.pop_back();
    deq.push_back(i);
    const int start = i - window + 1;
    if (start >= 0) {
      while (deq.front() < start) deq.pop_front();
      if (start < n) out[start] = values[deq.front() % n];
    }
  }
}

// Max-pools v over all viewport centers on the pixel grid itself. Exactly the
// double loop "for each pixel, max of v over member centers", evaluated per
// row pair with a circular window maximum over the unique columns.
std::vector<double> pool_on_own_grid(int width, int height, const GmmParams& params) {
  std::vector<double> lon_sum(width), lat(height), lat_sum(height);
  for (int s = 0; s < width; ++s) {
    const double lon = pixel_to_direction(s + 1, 1, width, height).longitude;
    lon_sum[s] = gmm_axis_sum(params.longitude_terms, lon);
  }
  for (int t = 0; t < height; ++t) {
    lat[t] = pixel_to_direction(1, t + 1, width, height).latitude;
    lat_sum[t] = gmm_axis_sum(params.latitude_terms, lat[t]);
  }

  const int unique_cols = width - 1;  // columns 1 and W share a meridian
  std::vector<double> col_max(unique_cols);
  for (int j = 0; j < unique_cols; ++j) col_max[j] = lon_sum[j];
  col_max[0] = std::max(lon_sum[0], lon_sum[unique_cols]);

  // Trig of the column offset angle, shared by every row pair.
  std::vector<double> cos_dlon(unique_cols), sin_dlon(unique_cols);
  for (int d = 0; d < unique_cols; ++d) {
    const double dlon = 360.0 * d / (width - 1) * kDegToRad;
    cos_dlon[d] = std::cos(dlon);
    sin_dlon[d] = std::sin(dlon);
  }
  std::vector<double> cos_lat(height), sin_lat(height);
  for (int t = 0; t < height; ++t) {
    cos_lat[t] = std::cos(lat[t] * kDegToRad);
    sin_lat[t] = std::sin(lat[t] * kDegToRad);
  }

  std::vector<double> pooled(static_cast<std::size_t>(width) * height, 0.0);

  parallel_for(static_cast<std::size_t>(height), [&](std::size_t t0, std::size_t t1) {
    std::vector<std::uint8_t> mask(unique_cols);
    std::vector<double> row(unique_cols), window_max;
    for (std::size_t tp = t0; tp < t1; ++tp) {     // pixel row
      std::fill(row.begin(), row.end(), 0.0);
      for (int tc = 0; tc < height; ++tc) {        // center row
        if (std::abs(lat[tp] - lat[tc]) > kMaxMemberDistanceDeg) continue;
        // Membership of pixel (s, tp) in the viewport centered at column
        // s+d (mod), row tc. Same local-frame math as viewport_contains.
        bool any = false, all = true;
        for (int d = 0; d < unique_cols; ++d) {
          const double x = cos_lat[tp] * cos_dlon[d];
          const double y = cos_lat[tp] * sin_dlon[d];
          const double z = sin_lat[tp];
          const double xl = cos_lat[tc] * x + sin_lat[tc] * z;
          const double zl = -sin_lat[tc] * x + cos_lat[tc] * z;
          const double llon = std::atan2(y, xl) * kRadToDeg;
          const double llat = std::asin(std::clamp(zl, -1.0, 1.0)) * kRadToDeg;
          mask[d] = std::abs(llon) <= kViewportHalfExtentDeg &&
                    std::abs(llat) <= kViewportHalfExtentDeg;
          any |= mask[d];
          all &= mask[d] != 0;
        }
        if (!any) continue;
        const double m = lat_sum[tc];
        if (all) {
          const double g = *std::max_element(col_max.begin(), col_max.end()) * m;
          for (int s = 0; s < unique_cols; ++s) row[s] = std::max(row[s], g);
          continue;
        }
        // Maximal circular runs of set offsets.
        int first_unset = 0;
        while (mask[first_unset]) ++first_unset;
        int d = first_unset;
        int seen = 0;
        while (seen < unique_cols) {
          while (seen < unique_cols && !mask[d]) {
            d = (d + 1) % unique_cols;
            ++seen;
          }
          if (seen >= unique_cols) break;
          const int run_start = d;
          int run_len = 0;
          while (seen < unique_cols && mask[d]) {
            d = (d + 1) % unique_cols;
            ++seen;
            ++run_len;
          }
          circular_window_max(col_max, run_len, window_max);
          for (int s = 0; s < unique_cols; ++s) {
            row[s] = std::max(row[s], m * window_max[(s + run_start) % unique_cols]);
          }
        }
      }
      double* out = pooled.data() + tp * width;
      for (int s = 0; s < unique_cols; ++s) out[s] = row[s];
      out[width - 1] = row[0];
    }
  });
  return pooled;
}

std::vector<double> bilinear_resize(const std::vector<double>& src, int sw, int sh, int dw,
                                    int dh) {
  std::vector<double> dst(static_cast<std::size_t>(dw) * dh);
  parallel_for(static_cast<std::size_t>(dh), [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      const double fy = dh == 1 ? 0.0 : static_cast<double>(y) * (sh - 1) / (dh - 1);
      const int iy = std::min(static_cast<int>(fy), sh - 2 >= 0 ? sh - 2 : 0);
      const double wy = fy - iy;
      for (int x = 0; x < dw; ++x) {
        const double fx = dw == 1 ? 0.0 : static_cast<double>(x) * (sw - 1) / (dw - 1);
        const int ix = std::min(static_cast<int>(fx), sw - 2 >= 0 ? sw - 2 : 0);
        const double wx = fx - ix;
        const double v00 = src[static_cast<std::size_t>(iy) * sw + ix];
        const double v01 = src[static_cast<std::size_t>(iy) * sw + std::min(ix + 1, sw - 1)];
        const double v10 = src[static_cast<std::size_t>(std::min(iy + 1, sh - 1)) * sw + ix];
        const double v11 =
            src[static_cast<std::size_t>(std::min(iy + 1, sh - 1)) * sw + std::min(ix + 1, sw - 1)];
        dst[y * dw + x] =
            (1.0 - wy) * ((1.0 - wx) * v00 + wx * v01) + wy * ((1.0 - wx) * v10 + wx * v11);
      }
    }
  });
  return dst;
}

void normalize(WeightMap& map) {
  double sum = 0.0;
  for (double w : map.weights) sum += w;
  if (!(sum > 0.0)) throw DataError("weight map sums to zero");
  for (double& w : map.weights) w /= sum;
  map.normalized = true;
}

}  // namespace

WeightMap ncp_weight_map(int width, int height, const GmmParams& params, int pool_width,
                         int pool_height) {
  if (width < 2 || height < 2) throw ArgumentError("grid must be at least 2x2");
  if (pool_width == 0 || pool_height == 0) {
    if (width <= 360 && height <= 180) {
      pool_width = width;
      pool_height = height;
    } else {
      pool_width = 360;
      pool_height = 180;
    }
  }
  WeightMap map;
  map.width = width;
  map.height = height;
  if (pool_width == width && pool_height == height) {
    map.weights = pool_on_own_grid(width, height, params);
  } else {
    const std::vector<double> pooled = pool_on_own_grid(pool_width, pool_height, params);
    map.weights = bilinear_resize(pooled, pool_width, pool_height, width, height);
  }
  normalize(map);
  return map;
}

WeightMap cp_weight_map(const WeightMap& ncp, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != ncp.weights.size()) {
    throw ArgumentError("mask dimensions do not match the weight map");
  }
  WeightMap map;
  map.width = ncp.width;
  map.height = ncp.height;
  map.weights.resize(ncp.weights.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    map.weights[i] = mask[i] ? ncp.weights[i] : 0.0;
  }
  normalize(map);
  return map;
}

WeightMap uniform_weight_map(int width, int height) {
  WeightMap map;
  map.width = width;
  map.height = height;
  map.weights.assign(static_cast<std::size_t>(width) * height,
                     1.0 / (static_cast<double>(width) * height));
  map.normalized = true;
  return map;
}

void save_weight_map(const WeightMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write weight map: " + path);
  const std::uint32_t w = static_cast<std::uint32_t>(map.width);
  const std::uint32_t h = static_cast<std::uint32_t>(map.height);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(map.weights.data()),
            static_cast<std::streamsize>(map.weights.size() * sizeof(double)));
  if (!out) throw DataError("failed writing weight map: " + path);
}

WeightMap load_weight_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open weight map: " + path);
  std::uint32_t w = 0, h = 0;
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || w < 2 || h < 2) throw DataError("bad weight map header: " + path);
  WeightMap map;
  map.width = static_cast<int>(w);
  map.height = static_cast<int>(h);
  map.weights.resize(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(map.weights.data()),
          static_cast<std::streamsize>(map.weights.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(map.weights.size() * sizeof(double))) {
    throw DataError("truncated weight map: " + path);
  }
  double sum = 0.0;
  for (double v : map.weights) {
    if (v < 0.0 || !std::isfinite(v)) throw DataError("negative or non-finite weight: " + path);
    sum += v;
  }
  map.normalized = std::abs(sum - 1.0) <= 1e-9;
  return map;
}

}  // namespace ovq
