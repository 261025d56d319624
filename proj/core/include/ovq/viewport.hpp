#pragma once

#include "ovq/frame.hpp"
#include "ovq/sphere.hpp"

namespace ovq {

// Square rectilinear rendering of the +-30 degree field around `center`.
// Chroma is rendered at full viewport resolution so all channels are co-sited.
struct ViewportImage {
  int size = 0;
  SphereDirection center;
  std::vector<std::uint8_t> luma;
  std::vector<std::uint8_t> chroma_u;
  std::vector<std::uint8_t> chroma_v;
};

// Gnomonic projection of the equirectangular frame, bilinear-sampled with
// longitude wrap and latitude clamp. size must be >= 64.
ViewportImage render_viewport(const Frame& frame, const SphereDirection& center, int size);

// Maps a viewport-plane point (pixel units, pixel centers at k+0.5) to its
// sphere direction, and back. Mutually inverse inside the viewport.
SphereDirection viewport_point_to_direction(const SphereDirection& center, int size, double x,
                                            double y);
bool direction_to_viewport_point(const SphereDirection& center, int size,
                                 const SphereDirection& d, double& x, double& y);

}  // namespace ovq
