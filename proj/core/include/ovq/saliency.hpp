#pragma once

#include <vector>

#include "ovq/viewport.hpp"

namespace ovq {

// Nonnegative saliency values over a square viewport, summing to 1.
struct SaliencyMap {
  int size = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * size + x]; }
};

// Phase spectrum of quaternion Fourier transform over the channels
// (motion, Y, U, V), where motion is |Y_t - Y_{t-1}| and zero when previous
// is absent. The quaternion transform runs as two complex FFTs (symplectic
// decomposition); the spectrum is reduced to unit magnitude, inverse
// transformed, squared, Gaussian smoothed and normalized to sum 1.
// A zero-energy input yields the uniform map.
SaliencyMap pqft_saliency(const ViewportImage& current, const ViewportImage* previous);

}  // namespace ovq
