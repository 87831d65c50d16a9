#pragma once

#include "turbfuse/frame.hpp"

namespace turbfuse {

struct MetricReport {
  double psnr = 0.0;  ///< dB, +inf for identical inputs
  double ssim = 0.0;
};

/// 10 log10(1 / MSE) with unit peak. Returns +infinity when the MSE is zero.
[[nodiscard]] double psnr(const Frame& a, const Frame& b);

/// Mean SSIM over all valid positions of an 11x11 Gaussian window
/// (sigma 1.5, C1 = 0.01^2, C2 = 0.03^2). Both sides must be >= 11.
[[nodiscard]] double ssim(const Frame& a, const Frame& b);

[[nodiscard]] MetricReport compare(const Frame& a, const Frame& b);

}  // namespace turbfuse
