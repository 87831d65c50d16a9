#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "turbfuse/frame.hpp"
#include "turbfuse/plane.hpp"

namespace turbfuse {

/// Dense per-pixel displacement in pixels. Backward convention: the
/// registered image at (x,y) is the moving image sampled at (x+u, y+v).
struct FlowField {
  Plane u;
  Plane v;

  FlowField() = default;
  FlowField(int width, int height) : u(width, height), v(width, height) {}
  FlowField(Plane u_, Plane v_);

  [[nodiscard]] int width() const noexcept { return u.width(); }
  [[nodiscard]] int height() const noexcept { return u.height(); }
};

[[nodiscard]] double mean_magnitude(const FlowField& flow);
[[nodiscard]] double max_magnitude(const FlowField& flow);

/// Pyramidal Horn-Schunck settings. `alpha` is the weight of the smoothness
/// term on unit-range intensities; it enters the Jacobi update as
/// alpha + Ix^2 + Iy^2 (not squared).
struct FlowParams {
  double alpha = 0.05;
  int iterations = 150;
  /// Number of pyramid levels including full resolution; nullopt = derive
  /// from the image size. Always clamped so the coarsest level is >= 16 px.
  std::optional<int> pyramid_levels;
  double scale = 0.5;
  int warps_per_level = 2;

  void validate() const;
};

/// Pyramid depth actually used for a width x height pair.
[[nodiscard]] int resolve_pyramid_levels(const FlowParams& params, int width, int height);

/// Per-pixel arithmetic mean of every frame.
[[nodiscard]] Frame reference_frame(const FrameSequence& seq);

/// Flow such that `moving` sampled at (x+u, y+v) approximates `reference`.
[[nodiscard]] FlowField estimate_flow(const Frame& moving, const Frame& reference,
                                      const FlowParams& params = {});

/// Backward bilinear warp with edge clamping.
[[nodiscard]] Frame warp(const Frame& frame, const FlowField& flow);
[[nodiscard]] Plane warp_plane(const Plane& plane, const Plane& u, const Plane& v);

/// `passes` rounds of: average -> flow to the average -> warp.
/// `flows_out` receives the flows of the last pass.
[[nodiscard]] FrameSequence register_sequence(const FrameSequence& seq, const FlowParams& params,
                                              int passes = 1,
                                              std::vector<FlowField>* flows_out = nullptr);

/// FLO2 dump: "FLO2", width and height as little-endian int32, then the u
/// plane and the v plane as little-endian float32 in row-major order.
void write_flo2(const FlowField& flow, const std::filesystem::path& path);
[[nodiscard]] FlowField read_flo2(const std::filesystem::path& path);

}  // namespace turbfuse
