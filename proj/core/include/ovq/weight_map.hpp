#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovq/gmm.hpp"

namespace ovq {

struct WeightMap {
  int width = 0;
  int height = 0;
  std::vector<double> weights;  // row-major, nonnegative
  bool normalized = false;

  double at(int x, int y) const { return weights[static_cast<std::size_t>(y) * width + x]; }
};

// Non-content-based weight map: the direction-probability map max-pooled over
// every viewport containing each pixel, then normalized to sum 1.
//
// Pooling runs on a candidate-center grid identical to the pixel grid. For
// outputs finer than the pooling resolution the pooled map is bilinearly
// upsampled to (width, height) before normalization. pool_width/pool_height 0
// selects the default rule: pool on the output grid when it is no finer than
// 360x180, else pool at 360x180.
WeightMap ncp_weight_map(int width, int height, const GmmParams& params, int pool_width = 0,
                         int pool_height = 0);

// Content-based weight map: ncp masked by a viewport binary map, renormalized.
// Throws if the masked map sums to zero.
WeightMap cp_weight_map(const WeightMap& ncp, const std::vector<std::uint8_t>& mask);

WeightMap uniform_weight_map(int width, int height);

// Cache file: two little-endian uint32 (W, H), then W*H little-endian float64
// row-major.
void save_weight_map(const WeightMap& map, const std::string& path);
WeightMap load_weight_map(const std::string& path);

}  // namespace ovq
