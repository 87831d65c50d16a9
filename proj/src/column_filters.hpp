#pragma once

// Column (vertical) filtering primitives of the dual-tree transform.
// Symmetric extension repeats the end samples.

#include <span>

#include "turbfuse/plane.hpp"

namespace turbfuse::detail {

/// Undecimated filtering of every column. Odd-length filters keep the
/// height; even-length filters produce height + 1 rows.
[[nodiscard]] Plane colfilter(const Plane& x, std::span<const double> h);

/// Two-tree decimating filter: `ha` runs on one phase, `hb` (its time
/// reverse) on the other, and the outputs are interleaved. Height must be a
/// multiple of 4; the result has half the rows.
[[nodiscard]] Plane coldfilt(const Plane& x, std::span<const double> ha,
                             std::span<const double> hb);

/// Interpolating counterpart of coldfilt. Height must be even; the result
/// has twice the rows.
[[nodiscard]] Plane colifilt(const Plane& x, std::span<const double> ha,
                             std::span<const double> hb);

[[nodiscard]] Plane add(const Plane& a, const Plane& b);

}  // namespace turbfuse::detail
