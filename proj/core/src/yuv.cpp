#include "ovq/yuv.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "ovq/errors.hpp"

namespace ovq {

std::size_t frame_bytes(int width, int height) {
  return static_cast<std::size_t>(width) * height * 3 / 2;
}

Frame make_frame(int width, int height, std::uint8_t y, std::uint8_t u, std::uint8_t v) {
  Frame f;
  f.width = width;
  f.height = height;
  f.luma.assign(static_cast<std::size_t>(width) * height, y);
  f.chroma_u.assign(static_cast<std::size_t>(width / 2) * (height / 2), u);
  f.chroma_v.assign(static_cast<std::size_t>(width / 2) * (height / 2), v);
  return f;
}

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw ArgumentError("frame dimensions must be positive and even, got " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

Frame read_yuv_frame(std::istream& source, int width, int height, std::size_t index) {
  check_dims(width, height);
  Frame f = make_frame(width, height);
  const std::streamoff offset =
      static_cast<std::streamoff>(index) * static_cast<std::streamoff>(frame_bytes(width, height));
  source.clear();
  source.seekg(offset, std::ios::beg);
  auto read_plane = [&](std::vector<std::uint8_t>& plane) {
    source.read(reinterpret_cast<char*>(plane.data()),
                static_cast<std::streamsize>(plane.size()));
    if (source.gcount() != static_cast<std::streamsize>(plane.size())) {
      throw DataError("truncated YUV stream while reading frame " + std::to_string(index));
    }
  };
  read_plane(f.luma);
  read_plane(f.chroma_u);
  read_plane(f.chroma_v);
  return f;
}

void write_yuv_frame(std::ostream& sink, const Frame& frame) {
  check_dims(frame.width, frame.height);
  sink.write(reinterpret_cast<const char*>(frame.luma.data()),
             static_cast<std::streamsize>(frame.luma.size()));
  sink.write(reinterpret_cast<const char*>(frame.chroma_u.data()),
             static_cast<std::streamsize>(frame.chroma_u.size()));
  sink.write(reinterpret_cast<const char*>(frame.chroma_v.data()),
             static_cast<std::streamsize>(frame.chroma_v.size()));
  if (!sink) throw DataError("failed to write YUV frame");
}

YuvFileSource::YuvFileSource(std::string path, int width, int height)
    : path_(std::move(path)), width_(width), height_(height) {
  check_dims(width, height);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path_, ec);
  if (ec) throw DataError("cannot stat YUV file: " + path_);
  const std::size_t per_frame = frame_bytes(width_, height_);
  if (size % per_frame != 0) {
    throw DataError("YUV file size " + std::to_string(size) + " is not a multiple of the " +
                    std::to_string(per_frame) + "-byte frame size: " + path_);
  }
  frame_count_ = size / per_frame;
}

Frame YuvFileSource::frame(std::size_t index) const {
  if (index >= frame_count_) {
    throw ArgumentError("frame index " + std::to_string(index) + " out of range (count " +
                        std::to_string(frame_count_) + "): " + path_);
  }
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw DataError("cannot open YUV file: " + path_);
  return read_yuv_frame(in, width_, height_, index);
}

MemorySource::MemorySource(std::vector<Frame> frames) : frames_(std::move(frames)) {}

Frame MemorySource::frame(std::size_t index) const {
  if (index >= frames_.size()) {
    throw ArgumentError("frame index " + std::to_string(index) + " out of range");
  }
  return frames_[index];
}

}  // namespace ovq
