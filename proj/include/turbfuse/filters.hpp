#pragma once

#include <span>
#include <vector>

#include "turbfuse/plane.hpp"

namespace turbfuse {

/// Normalized sampled Gaussian with radius ceil(3 sigma). sigma <= 0 gives {1}.
[[nodiscard]] std::vector<double> gaussian_kernel(double sigma);

/// Separable correlation with odd-length, centered kernels. Replicate border.
[[nodiscard]] Plane separable_filter(const Plane& in, std::span<const double> kx,
                                     std::span<const double> ky);

[[nodiscard]] Plane gaussian_blur(const Plane& in, double sigma);

/// Bilinear resample to a new grid with pixel-center alignment.
[[nodiscard]] Plane resize_bilinear(const Plane& in, int width, int height);

/// Bilinear sample at a real-valued position; coordinates are first clamped
/// to the image domain so out-of-range samples take the nearest edge pixel.
[[nodiscard]] double sample_bilinear(const Plane& in, double x, double y) noexcept;

/// Central differences with replicate border.
[[nodiscard]] Plane gradient_x(const Plane& in);
[[nodiscard]] Plane gradient_y(const Plane& in);

/// Sum of absolute forward differences in x and y.
[[nodiscard]] double total_variation(const Plane& in);

}  // namespace turbfuse
