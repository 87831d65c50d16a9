#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

#include "turbfuse/frame.hpp"

namespace turbfuse {

/// Rec.601 luminance of an integer-coded RGB sample, scaled to [0,1].
///
/// The weighted sum is formed in integer arithmetic so that a gray pixel
/// (v,v,v) maps to exactly the same value as the gray sample v.
[[nodiscard]] double luminance_from_rgb(std::uint32_t r, std::uint32_t g, std::uint32_t b,
                                        std::uint32_t max_code) noexcept;

/// Load one PNG (8/16-bit gray or RGB, alpha ignored) or binary PGM (P5).
[[nodiscard]] Frame load_frame(const std::filesystem::path& path);

/// Load every regular file in `dir` whose name matches the shell glob
/// `pattern`, sorted lexicographically by file name.
[[nodiscard]] FrameSequence load_sequence(const std::filesystem::path& dir,
                                          std::string_view pattern = "*.png");

/// Write an 8-bit grayscale PNG. Values are clamped to [0,1] and quantized
/// with round(v * 255).
void save_frame(const Frame& frame, const std::filesystem::path& path);

/// Write an 8-bit palette PNG from small non-negative labels (0 renders black).
void save_label_png(std::span<const int> labels, int width, int height,
                    const std::filesystem::path& path);

}  // namespace turbfuse
