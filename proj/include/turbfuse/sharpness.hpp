#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "turbfuse/frame.hpp"

namespace turbfuse {

/// Per-frame sharpness scores and their sequence-max normalization.
struct SharpnessSeries {
  std::vector<double> raw;
  std::vector<double> normalized;
  std::vector<std::string> frame_ids;
};

/// Mean 3x3 Sobel gradient magnitude over interior pixels (border excluded).
/// The kernels are unnormalized, so a unit step across one pixel scores 4.
[[nodiscard]] double sharpness(const Frame& frame);

[[nodiscard]] SharpnessSeries sharpness_series(const FrameSequence& seq);

/// Indices of the ceil(fraction * N) sharpest frames in ascending order.
/// Ties in score go to the earlier index.
[[nodiscard]] std::vector<std::size_t> select_indices(std::span<const double> scores,
                                                      double fraction);

/// The sharpest subset, preserving temporal order and source labels.
[[nodiscard]] FrameSequence select_frames(const FrameSequence& seq, double fraction);

/// CSV with header `frame_id,raw,normalized`.
void export_series_csv(const SharpnessSeries& series, const std::filesystem::path& path);

[[nodiscard]] double coefficient_of_variation(std::span<const double> values);

}  // namespace turbfuse
