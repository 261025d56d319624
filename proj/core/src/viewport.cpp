#include "ovq/viewport.hpp"

#include <algorithm>
#include <cmath>

#include "ovq/errors.hpp"

namespace ovq {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Half-extent of the gnomonic image plane at unit focal length.
const double kPlaneHalfExtent = std::tan(kViewportHalfExtentDeg * kDegToRad);

struct Rotation {
  // Columns of the local->world rotation: forward, left, up.
  Vec3 fwd, left, up;
};

Rotation local_frame(const SphereDirection& center) {
  const double lon = center.longitude * kDegToRad;
  const double lat = center.latitude * kDegToRad;
  const double cl = std::cos(lat), sl = std::sin(lat);
  const double co = std::cos(lon), so = std::sin(lon);
  Rotation r;
  r.fwd = {cl * co, cl * so, sl};
  r.left = {-so, co, 0.0};
  r.up = {-sl * co, -sl * so, cl};
  return r;
}

Vec3 local_to_world(const Rotation& r, double xl, double yl, double zl) {
  return {r.fwd.x * xl + r.left.x * yl + r.up.x * zl,
          r.fwd.y * xl + r.left.y * yl + r.up.y * zl,
          r.fwd.z * xl + r.left.z * yl + r.up.z * zl};
}

Vec3 world_to_local(const Rotation& r, const Vec3& p) {
  return {r.fwd.x * p.x + r.fwd.y * p.y + r.fwd.z * p.z,
          r.left.x * p.x + r.left.y * p.y + r.left.z * p.z,
          r.up.x * p.x + r.up.y * p.y + r.up.z * p.z};
}

// Bilinear sample of one plane at fractional equirectangular coordinates
// (1-based). Columns 1 and W are the same meridian, so clamping the upper
// neighbor is the correct wrap behavior under this pixel convention.
double sample_plane(const std::uint8_t* plane, int w, int h, double s, double t) {
  double x = std::clamp(s - 1.0, 0.0, static_cast<double>(w - 1));
  double y = std::clamp(t - 1.0, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = plane[static_cast<std::size_t>(y0) * w + x0];
  const double v01 = plane[static_cast<std::size_t>(y0) * w + x1];
  const double v10 = plane[static_cast<std::size_t>(y1) * w + x0];
  const double v11 = plane[static_cast<std::size_t>(y1) * w + x1];
  return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

SphereDirection viewport_point_to_direction(const SphereDirection& center, int size, double x,
                                            double y) {
  const Rotation r = local_frame(center);
  // Image x grows rightward (decreasing local longitude), y grows downward.
  const double a = kPlaneHalfExtent * (2.0 * x / size - 1.0);
  const double b = kPlaneHalfExtent * (2.0 * y / size - 1.0);
  const Vec3 world = local_to_world(r, 1.0, -a, -b);
  return to_direction(world);
}

bool direction_to_viewport_point(const SphereDirection& center, int size,
                                 const SphereDirection& d, double& x, double& y) {
  const Rotation r = local_frame(center);
  const Vec3 local = world_to_local(r, to_unit_vector(d));
  if (local.x <= 0.0) return false;  // behind the image plane
  const double a = -local.y / local.x;
  const double b = -local.z / local.x;
  x = size * (a / kPlaneHalfExtent + 1.0) / 2.0;
  y = size * (b / kPlaneHalfExtent + 1.0) / 2.0;
  return true;
}

ViewportImage render_viewport(const Frame& frame, const SphereDirection& center, int size) {
  if (size < 64) throw ArgumentError("viewport size must be >= 64");
  if (frame.width < 2 || frame.height < 2 || frame.luma.empty()) {
    throw ArgumentError("invalid frame");
  }
  ViewportImage vp;
  vp.size = size;
  vp.center = center;
  vp.luma.resize(static_cast<std::size_t>(size) * size);
  vp.chroma_u.resize(vp.luma.size());
  vp.chroma_v.resize(vp.luma.size());

  const int cw = frame.width / 2;
  const int ch = frame.height / 2;
  for (int py = 0; py < size; ++py) {
    for (int px = 0; px < size; ++px) {
      const SphereDirection d =
          viewport_point_to_direction(center, size, px + 0.5, py + 0.5);
      double s = 0.0, t = 0.0;
      direction_to_pixel(d, frame.width, frame.height, s, t);
      const std::size_t i = static_cast<std::size_t>(py) * size + px;
      vp.luma[i] = to_byte(sample_plane(frame.luma.data(), frame.width, frame.height, s, t));
      double cs = 0.0, ct = 0.0;
      direction_to_pixel(d, cw, ch, cs, ct);
      vp.chroma_u[i] = to_byte(sample_plane(frame.chroma_u.data(), cw, ch, cs, ct));
      vp.chroma_v[i] = to_byte(sample_plane(frame.chroma_v.data(), cw, ch, cs, ct));
    }
  }
  return vp;
}

}  // namespace ovq
