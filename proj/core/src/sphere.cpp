#include "ovq/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ovq/errors.hpp"

namespace ovq {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

void check_direction(const SphereDirection& d) {
  if (!(d.longitude >= -180.0 && d.longitude <= 180.0) ||
      !(d.latitude >= -90.0 && d.latitude <= 90.0)) {
    throw ArgumentError("direction out of range: (" + std::to_string(d.longitude) + ", " +
                        std::to_string(d.latitude) + ")");
  }
}

}  // namespace

Vec3 to_unit_vector(const SphereDirection& d) {
  const double lon = d.longitude * kDegToRad;
  const double lat = d.latitude * kDegToRad;
  const double cl = std::cos(lat);
  return {cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
}

SphereDirection to_direction(const Vec3& v) {
  const double lon = std::atan2(v.y, v.x) * kRadToDeg;
  const double norm = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  const double lat = std::asin(std::clamp(v.z / norm, -1.0, 1.0)) * kRadToDeg;
  return {lon, lat};
}

SphereDirection pixel_to_direction(int s, int t, int width, int height) {
  if (width < 2 || height < 2) {
    throw ArgumentError("grid must be at least 2x2");
  }
  if (s < 1 || s > width || t < 1 || t > height) {
    throw ArgumentError("pixel (" + std::to_string(s) + ", " + std::to_string(t) +
                        ") outside " + std::to_string(width) + "x" + std::to_string(height));
  }
  const double lon = -360.0 * (static_cast<double>(s - 1) / (width - 1) - 0.5);
  const double lat = -180.0 * (static_cast<double>(t - 1) / (height - 1) - 0.5);
  return {lon, lat};
}

void direction_to_pixel(const SphereDirection& d, int width, int height, double& s, double& t) {
  check_direction(d);
  s = (width - 1) * (0.5 - d.longitude / 360.0) + 1.0;
  t = (height - 1) * (0.5 - d.latitude / 180.0) + 1.0;
}

double angular_distance(const SphereDirection& a, const SphereDirection& b) {
  check_direction(a);
  check_direction(b);
  const Vec3 u = to_unit_vector(a);
  const Vec3 v = to_unit_vector(b);
  const double dot = u.x * v.x + u.y * v.y + u.z * v.z;
  const Vec3 c = {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
  const double cross = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
  return std::atan2(cross, dot) * kRadToDeg;
}

void local_offsets(const SphereDirection& center, const SphereDirection& d,
                   double& local_lon, double& local_lat) {
  const double tc = center.latitude * kDegToRad;
  const double dlon = (d.longitude - center.longitude) * kDegToRad;
  const double td = d.latitude * kDegToRad;
  // Yaw the center's longitude to zero, then pitch its latitude to zero.
  const double x = std::cos(td) * std::cos(dlon);
  const double y = std::cos(td) * std::sin(dlon);
  const double z = std::sin(td);
  const double xl = std::cos(tc) * x + std::sin(tc) * z;
  const double zl = -std::sin(tc) * x + std::cos(tc) * z;
  local_lon = std::atan2(y, xl) * kRadToDeg;
  local_lat = std::asin(std::clamp(zl, -1.0, 1.0)) * kRadToDeg;
}

bool viewport_contains(const SphereDirection& center, const SphereDirection& d) {
  check_direction(center);
  check_direction(d);
  double lon = 0.0, lat = 0.0;
  local_offsets(center, d, lon, lat);
  return std::abs(lon) <= kViewportHalfExtentDeg && std::abs(lat) <= kViewportHalfExtentDeg;
}

std::vector<std::uint8_t> viewport_binary_map(const SphereDirection& center, int width,
                                              int height) {
  check_direction(center);
  if (width < 2 || height < 2) throw ArgumentError("grid must be at least 2x2");
  std::vector<std::uint8_t> map(static_cast<std::size_t>(width) * height, 0);
  std::size_t set = 0;
  for (int t = 1; t <= height; ++t) {
    for (int s = 1; s <= width; ++s) {
      if (viewport_contains(center, pixel_to_direction(s, t, width, height))) {
        map[static_cast<std::size_t>(t - 1) * width + (s - 1)] = 1;
        ++set;
      }
    }
  }
  if (set == 0) {
    double fs = 0.0, ft = 0.0;
    direction_to_pixel(center, width, height, fs, ft);
    const int s = std::clamp(static_cast<int>(std::lround(fs)), 1, width);
    const int t = std::clamp(static_cast<int>(std::lround(ft)), 1, height);
    map[static_cast<std::size_t>(t - 1) * width + (s - 1)] = 1;
  }
  return map;
}

RegionId region_of(const SphereDirection& d) {
  check_direction(d);
  const Vec3 v = to_unit_vector(d);
  // Signed axis per region, in tie-break priority order.
  const struct {
    RegionId id;
    double component;
  } axes[6] = {
      {RegionId::Front, v.x},  {RegionId::Left, v.y},   {RegionId::Back, -v.x},
      {RegionId::Right, -v.y}, {RegionId::Top, v.z},    {RegionId::Bottom, -v.z},
  };
  RegionId best = RegionId::Front;
  double best_component = axes[0].component;
  for (int i = 1; i < 6; ++i) {
    if (axes[i].component > best_component) {
      best_component = axes[i].component;
      best = axes[i].id;
    }
  }
  return best;
}

}  // namespace ovq
