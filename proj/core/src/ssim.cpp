#include <cmath>
#include <vector>

#include "ovq/errors.hpp"
#include "ovq/metrics.hpp"
#include "ovq/parallel.hpp"

namespace ovq {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kWindow);
  const double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kRadius;
    k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Half-sample symmetric reflection: ... b a | a b c ... | c b
inline int reflect(int i, int n) {
  if (i < 0) i = -i - 1;
  if (i >= n) i = 2 * n - 1 - i;
  return i;
}

// Separable Gaussian filtering with symmetric padding, output at full size.
void gaussian_filter(const std::vector<double>& src, int w, int h, const std::vector<double>& k,
                     std::vector<double>& tmp, std::vector<double>& dst) {
  tmp.resize(src.size());
  dst.resize(src.size());
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      const double* row = src.data() + y * w;
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -kRadius; i <= kRadius; ++i) {
          acc += k[i + kRadius] * row[reflect(x + i, w)];
        }
        tmp[y * w + x] = acc;
      }
    }
  });
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t y0, std::size_t y1) {
    for (std::size_t y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -kRadius; i <= kRadius; ++i) {
          acc += k[i + kRadius] * src[static_cast<std::size_t>(reflect(static_cast<int>(y) + i, h)) * w + x];
        }
        dst[y * w + x] = acc;
      }
    }
  });
}

}  // namespace

std::vector<double> ssim_map(const std::vector<std::uint8_t>& ref,
                             const std::vector<std::uint8_t>& dist, int width, int height) {
  if (width < kWindow || height < kWindow) {
    throw ArgumentError("ssim_map needs frames of at least 11x11");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (ref.size() != n || dist.size() != n) throw ArgumentError("ssim_map plane size mismatch");

  static const std::vector<double> kernel = gaussian_kernel();

  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ref[i];
    y[i] = dist[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }

  std::vector<double> tmp, mu1, mu2, m11, m22, m12;
  gaussian_filter(x, width, height, kernel, tmp, mu1);
  gaussian_filter(y, width, height, kernel, tmp, mu2);
  gaussian_filter(xx, width, height, kernel, tmp, m11);
  gaussian_filter(yy, width, height, kernel, tmp, m22);
  gaussian_filter(xy, width, height, kernel, tmp, m12);

  std::vector<double> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu1i = mu1[i], mu2i = mu2[i];
    const double var1 = m11[i] - mu1i * mu1i;
    const double var2 = m22[i] - mu2i * mu2i;
    const double cov = m12[i] - mu1i * mu2i;
    map[i] = ((2.0 * mu1i * mu2i + kC1) * (2.0 * cov + kC2)) /
             ((mu1i * mu1i + mu2i * mu2i + kC1) * (var1 + var2 + kC2));
  }
  return map;
}

}  // namespace ovq
