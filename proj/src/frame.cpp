#include "turbfuse/frame.hpp"

#include <algorithm>
#include <cmath>

#include "turbfuse/error.hpp"

namespace turbfuse {
namespace {

void require_shape(const Plane& p) {
  if (p.width() < 1 || p.height() < 1) throw Error("frame dimensions must be positive");
}

void require_finite(const Plane& p) {
  require_shape(p);
  for (double v : p.values())
    if (!std::isfinite(v)) throw Error("frame contains a non-finite value");
}

}  // namespace

Frame::Frame(int width, int height, double fill) : Frame(Plane(width, height, fill)) {}

Frame::Frame(Plane pixels) : pixels_(std::move(pixels)) {
  require_shape(pixels_);
  for (double v : pixels_.values())
    if (!(v >= 0.0 && v <= 1.0)) throw Error("frame value outside [0,1] or not finite");
}

Frame::Frame(Plane pixels, NoRangeCheck) : pixels_(std::move(pixels)) { require_finite(pixels_); }

Frame Frame::unclamped(Plane pixels) { return Frame(std::move(pixels), NoRangeCheck{}); }

Frame clamp_unit(const Frame& frame) {
  Plane p = frame.pixels();
  for (double& v : p.values()) v = std::clamp(v, 0.0, 1.0);
  return Frame(std::move(p));
}

FrameSequence::FrameSequence(std::vector<Frame> frames, std::vector<std::string> source_ids)
    : frames_(std::move(frames)), source_ids_(std::move(source_ids)) {
  if (frames_.empty()) throw Error("frame sequence must contain at least one frame");
  if (source_ids_.size() != frames_.size())
    throw Error("frame sequence needs one source id per frame");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(frames_.front()))
      throw Error("inconsistent frame size: " + source_ids_[i]);
  }
}

FrameSequence::FrameSequence(std::vector<Frame> frames) {
  std::vector<std::string> ids(frames.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
  *this = FrameSequence(std::move(frames), std::move(ids));
}

}  // namespace turbfuse
