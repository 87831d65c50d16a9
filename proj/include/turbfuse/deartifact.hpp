#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "turbfuse/filter_bank.hpp"
#include "turbfuse/frame.hpp"

namespace turbfuse {

enum class DeartifactMode { builtin_shrinkage, external, none };

[[nodiscard]] DeartifactMode parse_deartifact_mode(std::string_view text);
[[nodiscard]] std::string_view to_string(DeartifactMode mode) noexcept;

struct DeartifactConfig {
  /// JPEG-style quality factor in [1,100]; lower restores harder.
  int quality_factor = 20;
  DeartifactMode mode = DeartifactMode::builtin_shrinkage;
  /// Shell command with {in}, {out} and {qf} placeholders (external mode).
  std::string external_cmd;

  void validate() const;
};

/// (100 - QF) / 80 clamped to [0, 1.25]: QF 20 -> 1, QF 100 -> 0.
[[nodiscard]] double shrinkage_strength(int quality_factor);

/// Shrink the magnitude of re + j*im by `threshold` (floored at zero),
/// keeping the phase.
[[nodiscard]] std::pair<double, double> soft_threshold(double re, double im, double threshold);

/// Phase-preserving complex-wavelet soft shrinkage, clamped to [0,1].
[[nodiscard]] Frame deartifact_builtin(const Frame& frame, const DeartifactConfig& config,
                                       const FilterBank& bank);

/// Run an external tool through PNG files. Errors carry the command line.
[[nodiscard]] Frame deartifact_external(const Frame& frame, const DeartifactConfig& config);

/// Dispatch on config.mode; mode none returns the input untouched.
[[nodiscard]] Frame deartifact(const Frame& frame, const DeartifactConfig& config,
                               const FilterBank& bank);

/// Replace every {in}, {out} and {qf} in `command`.
[[nodiscard]] std::string render_command(std::string_view command, std::string_view in,
                                         std::string_view out, int quality_factor);

}  // namespace turbfuse
