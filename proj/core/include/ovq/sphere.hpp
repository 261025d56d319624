#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ovq {

// A viewing direction on the sphere, longitude in [-180, 180] and latitude in
// [-90, 90] degrees. Longitude +180 and -180 name the same meridian.
struct SphereDirection {
  double longitude = 0.0;
  double latitude = 0.0;
};

enum class RegionId : std::uint8_t { Front = 0, Left, Back, Right, Top, Bottom };

constexpr std::array<const char*, 6> kRegionNames = {"front", "left",  "back",
                                                     "right", "top",   "bottom"};

// Unit vector with x toward (0,0), y toward (+90,0), z toward the north pole.
struct Vec3 {
  double x, y, z;
};

Vec3 to_unit_vector(const SphereDirection& d);
SphereDirection to_direction(const Vec3& v);

// Equirectangular pixel (s,t), 1-based with s in [1,W], t in [1,H], to its
// direction: lon = -360*((s-1)/(W-1) - 1/2), lat = -180*((t-1)/(H-1) - 1/2).
SphereDirection pixel_to_direction(int s, int t, int width, int height);

// Inverse of pixel_to_direction; fractional pixel coordinates are permitted.
void direction_to_pixel(const SphereDirection& d, int width, int height, double& s, double& t);

// Great-circle angle between two directions, in [0, 180] degrees.
double angular_distance(const SphereDirection& a, const SphereDirection& b);

// True when d lies inside the +-30 degree local longitude/latitude box of the
// viewport centered at `center` (sphere rotated so that center maps to (0,0)).
bool viewport_contains(const SphereDirection& center, const SphereDirection& d);

// Local longitude/latitude of d in the frame of `center`, degrees.
void local_offsets(const SphereDirection& center, const SphereDirection& d,
                   double& local_lon, double& local_lat);

// Per-pixel viewport membership mask over a WxH equirectangular grid.
// Guaranteed non-empty: if no pixel direction falls inside the box (possible
// only on degenerate tiny grids), the pixel nearest the center is set.
std::vector<std::uint8_t> viewport_binary_map(const SphereDirection& center, int width,
                                              int height);

// Cube-map face of a direction: dominant axis of its unit vector, ties broken
// front > left > back > right > top > bottom.
RegionId region_of(const SphereDirection& d);

constexpr double kViewportHalfExtentDeg = 30.0;

}  // namespace ovq
