#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>

#include "ovq/frame.hpp"

namespace ovq {

// Reads the index-th frame of a raw planar I420 stream. The stream is
// repositioned, so distinct frames may be read in any order; reading leaves
// no other frame's bytes consumed.
Frame read_yuv_frame(std::istream& source, int width, int height, std::size_t index);

void write_yuv_frame(std::ostream& sink, const Frame& frame);

// Random access over frames of one sequence.
class FrameSource {
public:
  virtual ~FrameSource() = default;
  virtual std::size_t frame_count() const = 0;
  virtual Frame frame(std::size_t index) const = 0;
  virtual int width() const = 0;
  virtual int height() const = 0;
};

// Raw .yuv file on disk. The file size must be a whole number of frames.
class YuvFileSource final : public FrameSource {
public:
  YuvFileSource(std::string path, int width, int height);

  std::size_t frame_count() const override { return frame_count_; }
  Frame frame(std::size_t index) const override;
  int width() const override { return width_; }
  int height() const override { return height_; }
  const std::string& path() const { return path_; }

private:
  std::string path_;
  int width_;
  int height_;
  std::size_t frame_count_;
};

// In-memory sequence, used by tests and synthetic pipelines.
class MemorySource final : public FrameSource {
public:
  explicit MemorySource(std::vector<Frame> frames);

  std::size_t frame_count() const override { return frames_.size(); }
  Frame frame(std::size_t index) const override;
  int width() const override { return frames_.empty() ? 0 : frames_[0].width; }
  int height() const override { return frames_.empty() ? 0 : frames_[0].height; }

private:
  std::vector<Frame> frames_;
};

}  // namespace ovq
