#pragma once

#include <cstdint>
#include <vector>

namespace ovq {

// One planar I420 picture: full-resolution luma plus quarter-resolution chroma.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> luma;      // width * height
  std::vector<std::uint8_t> chroma_u;  // (width/2) * (height/2)
  std::vector<std::uint8_t> chroma_v;  // (width/2) * (height/2)

  std::uint8_t y_at(int x, int y) const { return luma[static_cast<std::size_t>(y) * width + x]; }
};

// Bytes per I420 frame: W*H luma + 2 * (W/2 * H/2) chroma.
std::size_t frame_bytes(int width, int height);

// Allocates a frame with all planes set to the given values.
Frame make_frame(int width, int height, std::uint8_t y = 0, std::uint8_t u = 128,
                 std::uint8_t v = 128);

}  // namespace ovq
