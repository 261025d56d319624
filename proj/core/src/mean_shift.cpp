#include "ovq/mean_shift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <numeric>

#include "ovq/errors.hpp"
#include "ovq/parallel.hpp"

namespace ovq {

namespace {

constexpr int kMaxIterations = 200;

// Exact truncated-kernel evaluator: cell grid of size h, a query touches a
// 7x7 block since the kernel is cut at 3h.
class ExactField {
public:
  ExactField(const std::vector<Point2>& pts, const std::vector<double>& weights, double h)
      : pts_(pts), weights_(weights), h_(h) {
    min_x_ = min_y_ = 1e300;
    double max_x = -1e300, max_y = -1e300;
    for (const Point2& p : pts) {
      min_x_ = std::min(min_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    cols_ = static_cast<int>((max_x - min_x_) / h_) + 1;
    rows_ = static_cast<int>((max_y - min_y_) / h_) + 1;
    std::vector<int> counts(static_cast<std::size_t>(cols_) * rows_ + 1, 0);
    std::vector<int> cell_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = cell_index(pts[i]);
      ++counts[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    start_ = counts;
    order_.resize(pts.size());
    std::vector<int> cursor(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) order_[cursor[cell_of[i]]++] = static_cast<int>(i);
  }

  Point2 shifted(const Point2& q) const {
    const double r2 = 9.0 * h_ * h_;
    const double inv2h2 = 1.0 / (2.0 * h_ * h_);
    const int cx = static_cast<int>((q.x - min_x_) / h_);
    const int cy = static_cast<int>((q.y - min_y_) / h_);
    double wx = 0.0, wy = 0.0, wsum = 0.0;
    for (int gy = std::max(0, cy - 3); gy <= std::min(rows_ - 1, cy + 3); ++gy) {
      for (int gx = std::max(0, cx - 3); gx <= std::min(cols_ - 1, cx + 3); ++gx) {
        const int cell = gy * cols_ + gx;
        for (int k = start_[cell]; k < start_[cell + 1]; ++k) {
          const int i = order_[k];
          const double dx = pts_[i].x - q.x;
          const double dy = pts_[i].y - q.y;
          const double d2 = dx * dx + dy * dy;
          if (d2 > r2) continue;
          const double w = weights_[i] * std::exp(-d2 * inv2h2);
          wx += w * pts_[i].x;
          wy += w * pts_[i].y;
          wsum += w;
        }
      }
    }
    if (wsum <= 0.0) return q;
    return {wx / wsum, wy / wsum};
  }

private:
  int cell_index(const Point2& p) const {
    const int cx = std::min(cols_ - 1, std::max(0, static_cast<int>((p.x - min_x_) / h_)));
    const int cy = std::min(rows_ - 1, std::max(0, static_cast<int>((p.y - min_y_) / h_)));
    return cy * cols_ + cx;
  }

  const std::vector<Point2>& pts_;
  const std::vector<double>& weights_;
  double h_;
  double min_x_, min_y_;
  int cols_, rows_;
  std::vector<int> start_;
  std::vector<int> order_;
};

// Grid-accelerated evaluator for large point sets: the three KDE moment
// fields (mass, mass*x, mass*y) are splatted onto a unit grid, blurred with
// a separable Gaussian, and read back with bilinear interpolation. Shift
// queries cost O(1) after the O(N * kernel) precompute.
class GriddedField {
public:
  GriddedField(const std::vector<Point2>& pts, const std::vector<double>& weights, double h) {
    min_x_ = min_y_ = 1e300;
    double max_x = -1e300, max_y = -1e300;
    for (const Point2& p : pts) {
      min_x_ = std::min(min_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    cell_ = std::min(1.0, h / 4.0);
    const double pad = 3.0 * h + 2.0 * cell_;
    min_x_ -= pad;
    min_y_ -= pad;
    cols_ = static_cast<int>((max_x + pad - min_x_) / cell_) + 2;
    rows_ = static_cast<int>((max_y + pad - min_y_) / cell_) + 2;

    mass_.assign(static_cast<std::size_t>(cols_) * rows_, 0.0);
    mx_.assign(mass_.size(), 0.0);
    my_.assign(mass_.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      splat(pts[i], weights[i]);
    }

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * h / cell_)));
    std::vector<double> kernel(2 * radius + 1);
    const double sigma_cells = h / cell_;
    for (int k = -radius; k <= radius; ++k) {
      kernel[k + radius] = std::exp(-0.5 * (k / sigma_cells) * (k / sigma_cells));
    }
    blur(mass_, kernel, radius);
    blur(mx_, kernel, radius);
    blur(my_, kernel, radius);
  }

  Point2 shifted(const Point2& q) const {
    const double w = sample(mass_, q);
    if (w <= 1e-12) return q;
    return {sample(mx_, q) / w, sample(my_, q) / w};
  }

private:
  void splat(const Point2& p, double w) {
    const double gx = (p.x - min_x_) / cell_;
    const double gy = (p.y - min_y_) / cell_;
    const int x0 = static_cast<int>(gx);
    const int y0 = static_cast<int>(gy);
    const double fx = gx - x0;
    const double fy = gy - y0;
    const double ws[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const std::size_t idx[4] = {static_cast<std::size_t>(y0) * cols_ + x0,
                                static_cast<std::size_t>(y0) * cols_ + x0 + 1,
                                static_cast<std::size_t>(y0 + 1) * cols_ + x0,
                                static_cast<std::size_t>(y0 + 1) * cols_ + x0 + 1};
    for (int k = 0; k < 4; ++k) {
      mass_[idx[k]] += w * ws[k];
      mx_[idx[k]] += w * ws[k] * p.x;
      my_[idx[k]] += w * ws[k] * p.y;
    }
  }

  // Separable zero-padded blur (no mass beyond the data region).
  void blur(std::vector<double>& img, const std::vector<double>& kernel, int radius) const {
    std::vector<double> tmp(img.size(), 0.0);
    for (int y = 0; y < rows_; ++y) {
      const double* row = img.data() + static_cast<std::size_t>(y) * cols_;
      double* out = tmp.data() + static_cast<std::size_t>(y) * cols_;
      for (int x = 0; x < cols_; ++x) {
        double acc = 0.0;
        const int lo = std::max(-radius, -x), hi = std::min(radius, cols_ - 1 - x);
        for (int k = lo; k <= hi; ++k) acc += kernel[k + radius] * row[x + k];
        out[x] = acc;
      }
    }
    for (int x = 0; x < cols_; ++x) {
      for (int y = 0; y < rows_; ++y) {
        double acc = 0.0;
        const int lo = std::max(-radius, -y), hi = std::min(radius, rows_ - 1 - y);
        for (int k = lo; k <= hi; ++k) {
          acc += kernel[k + radius] * tmp[static_cast<std::size_t>(y + k) * cols_ + x];
        }
        img[static_cast<std::size_t>(y) * cols_ + x] = acc;
      }
    }
  }

  double sample(const std::vector<double>& img, const Point2& q) const {
    double gx = std::clamp((q.x - min_x_) / cell_, 0.0, cols_ - 1.001);
    double gy = std::clamp((q.y - min_y_) / cell_, 0.0, rows_ - 1.001);
    const int x0 = static_cast<int>(gx);
    const int y0 = static_cast<int>(gy);
    const double fx = gx - x0;
    const double fy = gy - y0;
    const std::size_t i = static_cast<std::size_t>(y0) * cols_ + x0;
    return (1 - fy) * ((1 - fx) * img[i] + fx * img[i + 1]) +
           fy * ((1 - fx) * img[i + cols_] + fx * img[i + cols_ + 1]);
  }

  double min_x_, min_y_, cell_;
  int cols_, rows_;
  std::vector<double> mass_, mx_, my_;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Cluster> mean_shift(const std::vector<Point2>& points, double bandwidth) {
  if (points.empty()) throw ArgumentError("mean_shift needs at least one point");
  if (!(bandwidth > 0.0)) throw ArgumentError("bandwidth must be positive");

  // Sampled points repeat pixel centers heavily; collapse duplicates so every
  // identical point shares one trajectory.
  std::map<std::pair<long, long>, int> unique_index;
  std::vector<Point2> unique_pts;
  std::vector<double> unique_weight;
  std::vector<int> point_to_unique(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto key = std::make_pair(static_cast<long>(std::llround(points[i].x * 16.0)),
                                    static_cast<long>(std::llround(points[i].y * 16.0)));
    auto it = unique_index.find(key);
    if (it == unique_index.end()) {
      it = unique_index.emplace(key, static_cast<int>(unique_pts.size())).first;
      unique_pts.push_back(points[i]);
      unique_weight.push_back(0.0);
    }
    unique_weight[it->second] += 1.0;
    point_to_unique[i] = it->second;
  }

  const double tol2 = 1e-8 * bandwidth * bandwidth;  // (1e-4 h)^2
  const int u_count = static_cast<int>(unique_pts.size());

  // The density field is fixed, so each seed converges independently. Large
  // point sets use the gridded evaluator; small ones stay exact.
  const ExactField* exact = nullptr;
  const GriddedField* gridded = nullptr;
  std::optional<ExactField> exact_storage;
  std::optional<GriddedField> gridded_storage;
  if (u_count <= 512) {
    exact_storage.emplace(unique_pts, unique_weight, bandwidth);
    exact = &*exact_storage;
  } else {
    gridded_storage.emplace(unique_pts, unique_weight, bandwidth);
    gridded = &*gridded_storage;
  }

  std::vector<Point2> modes(unique_pts);
  parallel_for(static_cast<std::size_t>(u_count), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Point2 q = modes[i];
      for (int iter = 0; iter < kMaxIterations; ++iter) {
        const Point2 next = exact ? exact->shifted(q) : gridded->shifted(q);
        const double dx = next.x - q.x;
        const double dy = next.y - q.y;
        q = next;
        if (dx * dx + dy * dy < tol2) break;
      }
      modes[i] = q;
    }
  });

  // Merge modes within bandwidth/2, transitively.
  const double merge_r = bandwidth / 2.0;
  UnionFind uf(u_count);
  {
    std::map<std::pair<long, long>, std::vector<int>> cells;
    for (int i = 0; i < u_count; ++i) {
      cells[{static_cast<long>(std::floor(modes[i].x / merge_r)),
             static_cast<long>(std::floor(modes[i].y / merge_r))}]
          .push_back(i);
    }
    for (const auto& [key, members] : cells) {
      for (long gy = key.second - 1; gy <= key.second + 1; ++gy) {
        for (long gx = key.first - 1; gx <= key.first + 1; ++gx) {
          auto it = cells.find({gx, gy});
          if (it == cells.end()) continue;
          for (int a : members) {
            for (int b : it->second) {
              if (b <= a) continue;
              const double dx = modes[a].x - modes[b].x;
              const double dy = modes[a].y - modes[b].y;
              if (dx * dx + dy * dy <= merge_r * merge_r) uf.unite(a, b);
            }
          }
        }
      }
    }
  }

  // Emit clusters ordered by their first member point.
  std::map<int, int> root_to_cluster;
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int root = uf.find(point_to_unique[i]);
    auto it = root_to_cluster.find(root);
    if (it == root_to_cluster.end()) {
      it = root_to_cluster.emplace(root, static_cast<int>(clusters.size())).first;
      clusters.push_back({});
    }
    clusters[it->second].member_indices.push_back(static_cast<int>(i));
  }
  // Cluster mode: weight-averaged mode of the merged component.
  std::vector<double> wsum(clusters.size(), 0.0);
  std::vector<Point2> msum(clusters.size());
  for (int i = 0; i < u_count; ++i) {
    const auto it = root_to_cluster.find(uf.find(i));
    if (it == root_to_cluster.end()) continue;
    const double w = unique_weight[i];
    msum[it->second].x += w * modes[i].x;
    msum[it->second].y += w * modes[i].y;
    wsum[it->second] += w;
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    clusters[c].mode = {msum[c].x / wsum[c], msum[c].y / wsum[c]};
  }
  return clusters;
}

}  // namespace ovq
