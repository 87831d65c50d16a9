#pragma once

#include <string>
#include <vector>

#include "turbfuse/plane.hpp"

namespace turbfuse {

/// Single-channel luminance image.
///
/// Frames built through the public constructor hold finite values in [0,1].
/// Stage outputs that are allowed to overshoot (inverse wavelet transform,
/// fusion) are built with `Frame::unclamped`, which only checks finiteness;
/// clamping happens at the deartifact stage or at save time.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, double fill = 0.0);
  explicit Frame(Plane pixels);

  static Frame unclamped(Plane pixels);

  [[nodiscard]] int width() const noexcept { return pixels_.width(); }
  [[nodiscard]] int height() const noexcept { return pixels_.height(); }
  [[nodiscard]] double operator()(int x, int y) const noexcept { return pixels_(x, y); }
  [[nodiscard]] const Plane& pixels() const noexcept { return pixels_; }
  [[nodiscard]] bool same_shape(const Frame& other) const noexcept {
    return pixels_.same_shape(other.pixels_);
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  struct NoRangeCheck {};
  Frame(Plane pixels, NoRangeCheck);

  Plane pixels_;
};

/// Clamp every value to [0,1].
[[nodiscard]] Frame clamp_unit(const Frame& frame);

/// Ordered, same-sized frames with one origin label per frame.
class FrameSequence {
 public:
  FrameSequence(std::vector<Frame> frames, std::vector<std::string> source_ids);
  /// Labels default to the frame index.
  explicit FrameSequence(std::vector<Frame> frames);

  [[nodiscard]] std::size_t size() const noexcept { return frames_.size(); }
  [[nodiscard]] int width() const noexcept { return frames_.front().width(); }
  [[nodiscard]] int height() const noexcept { return frames_.front().height(); }
  [[nodiscard]] const Frame& operator[](std::size_t i) const { return frames_[i]; }
  [[nodiscard]] const std::vector<Frame>& frames() const noexcept { return frames_; }
  [[nodiscard]] const std::vector<std::string>& source_ids() const noexcept {
    return source_ids_;
  }

  [[nodiscard]] auto begin() const noexcept { return frames_.begin(); }
  [[nodiscard]] auto end() const noexcept { return frames_.end(); }

 private:
  std::vector<Frame> frames_;
  std::vector<std::string> source_ids_;
};

}  // namespace turbfuse
