#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "turbfuse/frame.hpp"
#include "turbfuse/plane.hpp"

namespace testing_support {

/// Uniform values in [0,1) from a fixed-seed generator.
turbfuse::Plane random_plane(int width, int height, std::uint64_t seed);

/// Smooth random texture rescaled to [0,1].
turbfuse::Frame textured_frame(int width, int height, std::uint64_t seed, double sigma = 1.5);

/// 0.5 + 0.4 cos(k . x) whose stripes run at `edge_degrees`, measured
/// counter-clockwise from the x axis with y pointing up.
turbfuse::Frame grating(int width, int height, double edge_degrees, double period);

/// Pixels with value 1 in columns [x0, x1), 0 elsewhere.
turbfuse::Frame vertical_bar(int width, int height, int x0, int x1);

/// Integer translation with replicate border: out(x,y) = in(x-dx, y-dy).
turbfuse::Frame translate(const turbfuse::Frame& in, int dx, int dy);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Mean over pixels of the per-pixel population variance across frames.
double mean_temporal_variance(const turbfuse::FrameSequence& seq);

}  // namespace testing_support
