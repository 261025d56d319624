#include "ovq/heatmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include "ovq/errors.hpp"

namespace ovq {

double lonlat_correlation(const TraceSet& traces) {
  if (traces.records.size() < 2) throw DataError("need at least 2 samples");
  double mean_lon = 0.0, mean_lat = 0.0;
  for (const TraceRecord& r : traces.records) {
    mean_lon += r.direction.longitude;
    mean_lat += r.direction.latitude;
  }
  const double n = static_cast<double>(traces.records.size());
  mean_lon /= n;
  mean_lat /= n;
  double cov = 0.0, var_lon = 0.0, var_lat = 0.0;
  for (const TraceRecord& r : traces.records) {
    const double dl = r.direction.longitude - mean_lon;
    const double dt = r.direction.latitude - mean_lat;
    cov += dl * dt;
    var_lon += dl * dl;
    var_lat += dt * dt;
  }
  if (var_lon == 0.0 || var_lat == 0.0) {
    throw DataError("zero variance on one axis; correlation undefined");
  }
  return cov / (std::sqrt(var_lon) * std::sqrt(var_lat));
}

namespace {

inline int reflect(int i, int n) {
  if (i < 0) i = -i - 1;
  if (i >= n) i = 2 * n - 1 - i;
  return i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i / sigma) * (i / sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

HeatMap heatmap_from_traces(const TraceSet& traces, int width, int height, double sigma_deg) {
  if (traces.records.empty()) throw DataError("empty trace set");
  if (width < 2 || height < 2) throw ArgumentError("grid must be at least 2x2");
  if (!(sigma_deg > 0.0)) throw ArgumentError("sigma must be positive");

  HeatMap map;
  map.width = width;
  map.height = height;
  map.density.assign(static_cast<std::size_t>(width) * height, 0.0);
  for (const TraceRecord& r : traces.records) {
    double s = 0.0, t = 0.0;
    direction_to_pixel(r.direction, width, height, s, t);
    const int x = std::clamp(static_cast<int>(std::lround(s)) - 1, 0, width - 1);
    const int y = std::clamp(static_cast<int>(std::lround(t)) - 1, 0, height - 1);
    map.density[static_cast<std::size_t>(y) * width + x] += 1.0;
  }

  const double sigma_x = sigma_deg * (width - 1) / 360.0;
  const double sigma_y = sigma_deg * (height - 1) / 180.0;
  const std::vector<double> kx = gaussian_kernel(sigma_x);
  const std::vector<double> ky = gaussian_kernel(sigma_y);
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);

  std::vector<double> tmp(map.density.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -rx; i <= rx; ++i) {
        const int xi = ((x + i) % width + width) % width;  // longitude wraps
        acc += kx[i + rx] * map.density[static_cast<std::size_t>(y) * width + xi];
      }
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -ry; i <= ry; ++i) {
        acc += ky[i + ry] * tmp[static_cast<std::size_t>(reflect(y + i, height)) * width + x];
      }
      map.density[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return map;
}

double heatmap_cc(const HeatMap& a, const HeatMap& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ArgumentError("heat map dimensions differ");
  }
  const std::size_t n = a.density.size();
  if (n == 0) throw ArgumentError("empty heat map");
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a.density[i];
    mean_b += b.density[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a.density[i] - mean_a;
    const double db = b.density[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) throw DataError("constant heat map; CC undefined");
  return cov / std::sqrt(var_a * var_b);
}

void write_heatmap_pgm(const HeatMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write PGM: " + path);
  double max = 0.0;
  for (double v : map.density) max = std::max(max, v);
  if (max <= 0.0) max = 1.0;
  out << "P5\n" << map.width << " " << map.height << "\n65535\n";
  for (double v : map.density) {
    const unsigned value =
        static_cast<unsigned>(std::lround(std::clamp(v / max, 0.0, 1.0) * 65535.0));
    const unsigned char bytes[2] = {static_cast<unsigned char>(value >> 8),
                                    static_cast<unsigned char>(value & 0xFF)};
    out.write(reinterpret_cast<const char*>(bytes), 2);
  }
  if (!out) throw DataError("failed writing PGM: " + path);
}

void write_heatmap_f64(const HeatMap& map, const std::string& path) {
  static_assert(std::endian::native == std::endian::little);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write heat map grid: " + path);
  const std::uint32_t w = static_cast<std::uint32_t>(map.width);
  const std::uint32_t h = static_cast<std::uint32_t>(map.height);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(map.density.data()),
            static_cast<std::streamsize>(map.density.size() * sizeof(double)));
  if (!out) throw DataError("failed writing heat map grid: " + path);
}

}  // namespace ovq
