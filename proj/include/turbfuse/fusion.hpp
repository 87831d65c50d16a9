#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "turbfuse/dtcwt.hpp"
#include "turbfuse/frame.hpp"

namespace turbfuse {

enum class FusionMode { pixel_max, region };

[[nodiscard]] FusionMode parse_fusion_mode(std::string_view text);
[[nodiscard]] std::string_view to_string(FusionMode mode) noexcept;

struct FusionConfig {
  FusionMode mode = FusionMode::region;
  int levels = 4;
  /// Feature threshold is mean + k * stddev of the mean activity.
  double activity_threshold_k = 1.0;

  void validate() const;
};

/// Per-level sum over the six orientations of the coefficient magnitude.
struct ActivityMap {
  std::vector<Plane> levels;
};

[[nodiscard]] ActivityMap activity(const DtcwtPyramid& pyr);

struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  [[nodiscard]] int operator()(int x, int y) const noexcept {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Per-level labels: 0 is background, 1..region_counts[l] are 8-connected
/// feature regions numbered in raster-scan discovery order.
struct RegionMap {
  std::vector<LabelImage> levels;
  std::vector<int> region_counts;
};

[[nodiscard]] LabelImage segment_level(const Plane& mean_activity, double threshold_k,
                                       int* region_count = nullptr);
[[nodiscard]] RegionMap segment(const std::vector<Plane>& mean_activity, double threshold_k);

/// Combine same-shaped pyramids. The lowpass is always the mean; the
/// subbands follow `config.mode`. Ties go to the lowest frame index.
[[nodiscard]] DtcwtPyramid fuse_sequence(const std::vector<DtcwtPyramid>& pyrs,
                                         const FusionConfig& config,
                                         RegionMap* regions_out = nullptr);

/// Forward-transform every frame, fuse, and invert. Not clamped.
[[nodiscard]] Frame fuse_frames(const FrameSequence& frames, const FusionConfig& config,
                                const FilterBank& bank, RegionMap* regions_out = nullptr);

/// Indexed PNG per level: <dir>/regions_level<N>.png
void dump_region_maps(const RegionMap& regions, const std::filesystem::path& dir);

}  // namespace turbfuse
