#pragma once

#include <vector>

namespace ovq {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Cluster {
  Point2 mode;                       // converged density mode
  std::vector<int> member_indices;   // indices into the input point list
};

// Gaussian-kernel mean shift. Every point is shifted to a density mode; modes
// closer than bandwidth/2 are merged transitively; every point lands in
// exactly one cluster. Cluster order follows the first member's input index.
std::vector<Cluster> mean_shift(const std::vector<Point2>& points, double bandwidth);

}  // namespace ovq
