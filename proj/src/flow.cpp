#include "turbfuse/flow.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "turbfuse/error.hpp"
#include "turbfuse/filters.hpp"
#include "turbfuse/parallel.hpp"

namespace turbfuse {

FlowField::FlowField(Plane u_, Plane v_) : u(std::move(u_)), v(std::move(v_)) {
  if (!u.same_shape(v)) throw Error("flow components differ in size");
}

double mean_magnitude(const FlowField& flow) {
  if (flow.u.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < flow.u.size(); ++i)
    total += std::hypot(flow.u.values()[i], flow.v.values()[i]);
  return total / static_cast<double>(flow.u.size());
}

double max_magnitude(const FlowField& flow) {
  double peak = 0.0;
  for (std::size_t i = 0; i < flow.u.size(); ++i)
    peak = std::max(peak, std::hypot(flow.u.values()[i], flow.v.values()[i]));
  return peak;
}

void FlowParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("flow alpha must be > 0");
  if (iterations < 1) throw ConfigError("flow iterations must be >= 1");
  if (pyramid_levels && *pyramid_levels < 1) throw ConfigError("pyramid levels must be >= 1");
  if (!(scale > 0.0 && scale < 1.0)) throw ConfigError("pyramid scale must be in (0,1)");
  if (warps_per_level < 1) throw ConfigError("warps per level must be >= 1");
}

namespace {

constexpr int kCoarsestSide = 16;
constexpr int kMaxAutoLevels = 5;

int next_size(int size, double scale) {
  return std::max(1, static_cast<int>(std::lround(size * scale)));
}

Plane downsample(const Plane& in, int width, int height) {
  static constexpr std::array<double, 5> kBinomial{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16,
                                                   1.0 / 16};
  return resize_bilinear(separable_filter(in, kBinomial, kBinomial), width, height);
}

std::vector<Plane> build_pyramid(const Plane& base, int levels, double scale) {
  std::vector<Plane> pyr{base};
  for (int l = 1; l < levels; ++l) {
    const Plane& prev = pyr.back();
    pyr.push_back(downsample(prev, next_size(prev.width(), scale), next_size(prev.height(), scale)));
  }
  return pyr;
}

// Horn-Schunck neighbourhood average (1/6 edge, 1/12 corner) with
// replicate border.
void neighbour_average(const Plane& in, Plane& out) {
  const int w = in.width();
  const int h = in.height();
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, w - 1);
      out(x, y) = (in(xm, y) + in(xp, y) + in(x, ym) + in(x, yp)) / 6.0 +
                  (in(xm, ym) + in(xp, ym) + in(xm, yp) + in(xp, yp)) / 12.0;
    }
  }
}

// Warping iterations at one pyramid level; u, v hold the initial flow on entry.
void refine_level(const Plane& moving, const Plane& reference, const FlowParams& params,
                  Plane& u, Plane& v) {
  const double lambda = params.alpha;
  const int w = moving.width();
  const int h = moving.height();
  const Plane ref_gx = gradient_x(reference);
  const Plane ref_gy = gradient_y(reference);
  Plane ubar(w, h), vbar(w, h);

  for (int warp_index = 0; warp_index < params.warps_per_level; ++warp_index) {
    const Plane warped = warp_plane(moving, u, v);
    const Plane warped_gx = gradient_x(warped);
    const Plane warped_gy = gradient_y(warped);
    const Plane u0 = u;
    const Plane v0 = v;

    Plane ix(w, h), iy(w, h), it(w, h);
    for (std::size_t i = 0; i < ix.size(); ++i) {
      ix.values()[i] = 0.5 * (warped_gx.values()[i] + ref_gx.values()[i]);
      iy.values()[i] = 0.5 * (warped_gy.values()[i] + ref_gy.values()[i]);
      // Linearize around the warp-start flow: residual at (u0,v0) minus
      // the gradient projection of (u0,v0) itself.
      it.values()[i] = warped.values()[i] - reference.values()[i] -
                       ix.values()[i] * u0.values()[i] - iy.values()[i] * v0.values()[i];
    }

    for (int iter = 0; iter < params.iterations; ++iter) {
      neighbour_average(u, ubar);
      neighbour_average(v, vbar);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double gx = ix.values()[i];
        const double gy = iy.values()[i];
        const double ub = ubar.values()[i];
        const double vb = vbar.values()[i];
        const double residual = gx * ub + gy * vb + it.values()[i];
        const double k = residual / (lambda + gx * gx + gy * gy);
        u.values()[i] = ub - gx * k;
        v.values()[i] = vb - gy * k;
      }
    }
  }
}

}  // namespace

int resolve_pyramid_levels(const FlowParams& params, int width, int height) {
  const int min_side = std::min(width, height);
  int levels = 0;
  if (params.pyramid_levels) {
    levels = *params.pyramid_levels;
  } else {
    levels = static_cast<int>(std::floor(std::log(static_cast<double>(min_side) / kCoarsestSide) /
                                         std::log(1.0 / params.scale)));
    levels = std::clamp(levels, 1, kMaxAutoLevels);
  }
  // Walk down the pyramid and stop before a level falls under the minimum.
  int w = width;
  int h = height;
  int usable = 1;
  while (usable < levels) {
    w = next_size(w, params.scale);
    h = next_size(h, params.scale);
    if (std::min(w, h) < kCoarsestSide) break;
    ++usable;
  }
  return usable;
}

Frame reference_frame(const FrameSequence& seq) {
  Plane acc(seq.width(), seq.height());
  for (const Frame& f : seq) {
    const auto src = f.pixels().values();
    auto dst = acc.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const double n = static_cast<double>(seq.size());
  for (double& v : acc.values()) v /= n;
  if (seq.size() == 1) return seq[0];
  return Frame::unclamped(std::move(acc));
}

FlowField estimate_flow(const Frame& moving, const Frame& reference, const FlowParams& params) {
  params.validate();
  if (!moving.same_shape(reference)) throw Error("estimate_flow: dimension mismatch");
  if (std::min(moving.width(), moving.height()) < kCoarsestSide)
    throw Error("estimate_flow: frame smaller than 16 px");

  const int levels = resolve_pyramid_levels(params, moving.width(), moving.height());
  const auto mov_pyr = build_pyramid(moving.pixels(), levels, params.scale);
  const auto ref_pyr = build_pyramid(reference.pixels(), levels, params.scale);

  Plane u(mov_pyr.back().width(), mov_pyr.back().height());
  Plane v = u;
  for (int l = levels - 1; l >= 0; --l) {
    const Plane& mov = mov_pyr[l];
    if (u.width() != mov.width() || u.height() != mov.height()) {
      const double sx = static_cast<double>(mov.width()) / u.width();
      const double sy = static_cast<double>(mov.height()) / u.height();
      u = resize_bilinear(u, mov.width(), mov.height());
      v = resize_bilinear(v, mov.width(), mov.height());
      for (double& x : u.values()) x *= sx;
      for (double& y : v.values()) y *= sy;
    }
    refine_level(mov, ref_pyr[l], params, u, v);
  }
  return FlowField(std::move(u), std::move(v));
}

Plane warp_plane(const Plane& plane, const Plane& u, const Plane& v) {
  if (!plane.same_shape(u) || !plane.same_shape(v)) throw Error("warp: dimension mismatch");
  Plane out(plane.width(), plane.height());
  for (int y = 0; y < plane.height(); ++y)
    for (int x = 0; x < plane.width(); ++x)
      out(x, y) = sample_bilinear(plane, x + u(x, y), y + v(x, y));
  return out;
}

Frame warp(const Frame& frame, const FlowField& flow) {
  return Frame::unclamped(warp_plane(frame.pixels(), flow.u, flow.v));
}

FrameSequence register_sequence(const FrameSequence& seq, const FlowParams& params, int passes,
                                std::vector<FlowField>* flows_out) {
  if (passes < 1) throw ConfigError("registration passes must be >= 1");
  params.validate();
  FrameSequence current = seq;
  for (int pass = 0; pass < passes; ++pass) {
    const Frame reference = reference_frame(current);
    std::vector<Frame> registered(current.size());
    std::vector<FlowField> flows(current.size());
    parallel_for(current.size(), [&](std::size_t i) {
      flows[i] = estimate_flow(current[i], reference, params);
      registered[i] = warp(current[i], flows[i]);
    });
    current = FrameSequence(std::move(registered), seq.source_ids());
    if (flows_out) *flows_out = std::move(flows);
  }
  return current;
}

namespace {

void put_u32le(std::ostream& out, std::uint32_t value) {
  const std::array<char, 4> bytes{static_cast<char>(value & 0xff),
                                  static_cast<char>((value >> 8) & 0xff),
                                  static_cast<char>((value >> 16) & 0xff),
                                  static_cast<char>((value >> 24) & 0xff)};
  out.write(bytes.data(), 4);
}

std::uint32_t get_u32le(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_flo2(const FlowField& flow, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write("FLO2", 4);
  put_u32le(out, static_cast<std::uint32_t>(flow.width()));
  put_u32le(out, static_cast<std::uint32_t>(flow.height()));
  for (const Plane* plane : {&flow.u, &flow.v})
    for (double value : plane->values())
      put_u32le(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
  if (!out) throw IoError("failed writing " + path.string());
}

FlowField read_flo2(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "FLO2", 4) != 0) throw IoError("not a FLO2 file: " + path.string());
  const auto width = static_cast<int>(get_u32le(in));
  const auto height = static_cast<int>(get_u32le(in));
  if (!in || width <= 0 || height <= 0) throw IoError("bad FLO2 header in " + path.string());
  FlowField flow(width, height);
  for (Plane* plane : {&flow.u, &flow.v})
    for (double& value : plane->values()) value = std::bit_cast<float>(get_u32le(in));
  if (!in) throw IoError("truncated FLO2 data in " + path.string());
  return flow;
}

}  // namespace turbfuse
