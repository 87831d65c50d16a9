#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "turbfuse/filter_bank.hpp"
#include "turbfuse/frame.hpp"
#include "turbfuse/plane.hpp"

namespace turbfuse {

/// Complex subband stored as separate real and imaginary planes.
struct ComplexPlane {
  Plane real;
  Plane imag;

  ComplexPlane() = default;
  ComplexPlane(int width, int height) : real(width, height), imag(width, height) {}

  [[nodiscard]] int width() const noexcept { return real.width(); }
  [[nodiscard]] int height() const noexcept { return real.height(); }
  [[nodiscard]] double magnitude(int x, int y) const noexcept;
  [[nodiscard]] double energy() const noexcept;

  friend bool operator==(const ComplexPlane&, const ComplexPlane&) = default;
};

/// Subband order within a level. Angles name the edge direction a subband
/// responds to, counter-clockwise from the x axis with y pointing up;
/// index k corresponds to 15 + 30k degrees.
enum class Orientation { deg15 = 0, deg45, deg75, deg105, deg135, deg165 };
inline constexpr int kOrientations = 6;
[[nodiscard]] int orientation_degrees(Orientation o) noexcept;

struct DtcwtLevel {
  std::array<ComplexPlane, kOrientations> subbands;

  [[nodiscard]] int width() const noexcept { return subbands[0].width(); }
  [[nodiscard]] int height() const noexcept { return subbands[0].height(); }
  [[nodiscard]] double energy() const noexcept;

  friend bool operator==(const DtcwtLevel&, const DtcwtLevel&) = default;
};

/// Multilevel dual-tree decomposition of one image. levels[0] is the finest.
struct DtcwtPyramid {
  std::vector<DtcwtLevel> levels;
  Plane lowpass;
  int original_width = 0;
  int original_height = 0;

  friend bool operator==(const DtcwtPyramid&, const DtcwtPyramid&) = default;
};

inline constexpr int kMaxDtcwtLevels = 6;

/// Forward 2-D DT-CWT. Requires 1 <= levels <= 6 and min side >= 2^levels.
[[nodiscard]] DtcwtPyramid dtcwt_forward(const Plane& image, int levels, const FilterBank& bank);
[[nodiscard]] DtcwtPyramid dtcwt_forward(const Frame& frame, int levels, const FilterBank& bank);

/// Inverse transform cropped to the original size. The output is not
/// clamped.
[[nodiscard]] Plane dtcwt_inverse_plane(const DtcwtPyramid& pyr, const FilterBank& bank);
[[nodiscard]] Frame dtcwt_inverse(const DtcwtPyramid& pyr, const FilterBank& bank);

/// Throws Error on inconsistent subband counts or sizes.
void check_pyramid_structure(const DtcwtPyramid& pyr);
[[nodiscard]] bool same_structure(const DtcwtPyramid& a, const DtcwtPyramid& b) noexcept;

/// Largest usable depth (<= requested) for a width x height image.
[[nodiscard]] int max_dtcwt_levels(int width, int height, int requested) noexcept;

/// Debug dump: one little-endian float32 file per subband plane plus a
/// JSON manifest describing level, orientation, part and dimensions.
void dump_pyramid(const DtcwtPyramid& pyr, const std::filesystem::path& dir);

}  // namespace turbfuse
