#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ovq/frame.hpp"
#include "ovq/sphere.hpp"
#include "ovq/traces.hpp"
#include "ovq/yuv.hpp"

namespace testutil {

// Self-cleaning unique temp directory.
class TempDir {
public:
  TempDir() {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("ovq-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
  std::filesystem::path dir_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Deterministic byte noise.
inline std::uint64_t splitmix(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline ovq::Frame random_frame(int w, int h, std::uint64_t seed) {
  ovq::Frame f = ovq::make_frame(w, h);
  std::uint64_t s = seed;
  for (auto& v : f.luma) v = static_cast<std::uint8_t>(splitmix(s) & 0xFF);
  for (auto& v : f.chroma_u) v = static_cast<std::uint8_t>(splitmix(s) & 0xFF);
  for (auto& v : f.chroma_v) v = static_cast<std::uint8_t>(splitmix(s) & 0xFF);
  return f;
}

// Paints a filled luma disc at the pixel position of a sphere direction.
inline void paint_disc(ovq::Frame& f, const ovq::SphereDirection& at, double radius,
                       std::uint8_t value) {
  double s = 0.0, t = 0.0;
  ovq::direction_to_pixel(at, f.width, f.height, s, t);
  const double cx = s - 1.0, cy = t - 1.0;
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= radius * radius) {
        f.luma[static_cast<std::size_t>(y) * f.width + x] = value;
      }
    }
  }
}

inline void save_yuv(const std::string& path, const std::vector<ovq::Frame>& frames) {
  std::ofstream out(path, std::ios::binary);
  for (const ovq::Frame& f : frames) ovq::write_yuv_frame(out, f);
}

// One static viewer: samples 0..count-1 at a fixed direction.
inline void append_static_trace(ovq::TraceSet& traces, const std::string& subject,
                                const std::string& sequence, const ovq::SphereDirection& dir,
                                long count) {
  for (long k = 0; k < count; ++k) {
    traces.records.push_back({subject, sequence, k, dir});
  }
}

}  // namespace testutil
