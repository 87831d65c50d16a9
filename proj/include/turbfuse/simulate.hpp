#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "turbfuse/flow.hpp"
#include "turbfuse/frame.hpp"

namespace turbfuse {

struct TurbulenceParams {
  double warp_amplitude = 2.0;   ///< peak tilt displacement, pixels
  double warp_smoothness = 8.0;  ///< Gaussian sigma of the tilt field, pixels
  double blur_sigma_min = 0.5;
  double blur_sigma_max = 2.5;
  double noise_sigma = 0.01;
  int frames = 100;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SimulatedSequence {
  FrameSequence frames;
  /// Ground-truth backward warps, one per frame.
  std::vector<FlowField> flows;
};

/// Tilt + blur + noise degradation of `clean`. Frame i draws from an RNG
/// seeded with (seed, i), so output is reproducible bit for bit.
[[nodiscard]] SimulatedSequence degrade(const Frame& clean, const TurbulenceParams& params);

/// Procedural glyph strokes (0.1) on a light card (0.9), one glyph per byte.
[[nodiscard]] Frame text_card(int width, int height, std::string_view text);

/// Write frame_NNNN.png files, truth/clean.png, manifest.json (parameters,
/// seed and the clean image path) and optionally flows/frame_NNNN.flo2.
void save_simulation(const SimulatedSequence& sim, const Frame& clean,
                     const TurbulenceParams& params, const std::filesystem::path& dir,
                     bool dump_flows = false, const std::string& text = {});

}  // namespace turbfuse
