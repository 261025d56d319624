#include "ovq/saliency.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "ovq/errors.hpp"

namespace ovq {

namespace {

// FFTW plan creation is not thread safe; execution on distinct buffers is.
// Plans are cached per (size, direction) with FFTW_UNALIGNED so they run on
// any caller buffer, and FFTW_ESTIMATE so planning is deterministic.
class PlanCache {
public:
  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> probe(static_cast<std::size_t>(n) * n);
    fftw_plan plan = fftw_plan_dft_2d(
        n, n, reinterpret_cast<fftw_complex*>(probe.data()),
        reinterpret_cast<fftw_complex*>(probe.data()), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void fft2_inplace(std::vector<std::complex<double>>& data, int n, int sign) {
  fftw_plan plan = plan_cache().get(n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
}

inline int reflect(int i, int n) {
  if (i < 0) i = -i - 1;
  if (i >= n) i = 2 * n - 1 - i;
  return i;
}

void gaussian_smooth(std::vector<double>& img, int n, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i / sigma) * (i / sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  std::vector<double> tmp(img.size());
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * img[static_cast<std::size_t>(y) * n + reflect(x + i, n)];
      }
      tmp[static_cast<std::size_t>(y) * n + x] = acc;
    }
  }
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(reflect(y + i, n)) * n + x];
      }
      img[static_cast<std::size_t>(y) * n + x] = acc;
    }
  }
}

}  // namespace

SaliencyMap pqft_saliency(const ViewportImage& current, const ViewportImage* previous) {
  const int n = current.size;
  if (n <= 0) throw ArgumentError("empty viewport");
  if (previous != nullptr && previous->size != n) {
    throw ArgumentError("previous viewport size differs from current");
  }
  const std::size_t count = static_cast<std::size_t>(n) * n;

  // Quaternion q = motion + U*i + (V + Y*i)*j, split into the two complex
  // planes f1 = motion + i*U and f2 = V + i*Y.
  std::vector<std::complex<double>> f1(count), f2(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double y = current.luma[i] / 255.0;
    const double u = current.chroma_u[i] / 255.0;
    const double v = current.chroma_v[i] / 255.0;
    const double motion =
        previous ? std::abs(y - previous->luma[i] / 255.0) : 0.0;
    f1[i] = {motion, u};
    f2[i] = {v, y};
  }

  fft2_inplace(f1, n, FFTW_FORWARD);
  fft2_inplace(f2, n, FFTW_FORWARD);

  // Keep only the phase: divide each quaternion frequency coefficient by its
  // magnitude sqrt(|F1|^2 + |F2|^2); zero-energy bins stay zero.
  for (std::size_t i = 0; i < count; ++i) {
    const double mag = std::sqrt(std::norm(f1[i]) + std::norm(f2[i]));
    if (mag > 0.0) {
      f1[i] /= mag;
      f2[i] /= mag;
    } else {
      f1[i] = 0.0;
      f2[i] = 0.0;
    }
  }

  fft2_inplace(f1, n, FFTW_BACKWARD);
  fft2_inplace(f2, n, FFTW_BACKWARD);

  SaliencyMap map;
  map.size = n;
  map.values.resize(count);
  const double inv_n2 = 1.0 / (static_cast<double>(count) * count);  // FFTW is unnormalized
  for (std::size_t i = 0; i < count; ++i) {
    map.values[i] = (std::norm(f1[i]) + std::norm(f2[i])) * inv_n2;
  }

  gaussian_smooth(map.values, n, 0.02 * n);

  double sum = 0.0;
  for (double v : map.values) sum += v;
  if (sum <= 1e-300) {
    const double uniform = 1.0 / static_cast<double>(count);
    for (double& v : map.values) v = uniform;
  } else {
    for (double& v : map.values) v /= sum;
  }
  return map;
}

}  // namespace ovq
