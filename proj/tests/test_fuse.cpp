#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "support.hpp"
#include "turbfuse/error.hpp"
#include "turbfuse/filters.hpp"
#include "turbfuse/flow.hpp"
#include "turbfuse/fusion.hpp"
#include "turbfuse/metrics.hpp"
#include "turbfuse/sharpness.hpp"
#include "turbfuse/simulate.hpp"

using namespace turbfuse;
using testing_support::random_plane;
using testing_support::textured_frame;

namespace {

const FilterBank& bank() {
  static const FilterBank b = builtin_filter_bank();
  return b;
}

// Connected components by recursive flood fill over a precomputed mask.
int count_components(const std::vector<bool>& mask, int w, int h) {
  std::vector<bool> seen(mask.size(), false);
  std::function<void(int, int)> fill = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!mask[i] || seen[i]) return;
    seen[i] = true;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) fill(x + dx, y + dy);
  };
  int count = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (mask[static_cast<std::size_t>(y) * w + x] && !seen[static_cast<std::size_t>(y) * w + x]) {
        ++count;
        fill(x, y);
      }
  return count;
}

DtcwtPyramid scaled(DtcwtPyramid p, double gain) {
  for (auto& level : p.levels)
    for (auto& s : level.subbands) {
      for (double& v : s.real.values()) v *= gain;
      for (double& v : s.imag.values()) v *= gain;
    }
  return p;
}

Frame mean_frame(const FrameSequence& seq) {
  Plane m(seq.width(), seq.height());
  for (const Frame& f : seq)
    for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] += f.pixels().values()[i];
  for (double& v : m.values()) v /= static_cast<double>(seq.size());
  return Frame(std::move(m));
}

}  // namespace

TEST_CASE("activity examples") {
  DtcwtPyramid pyr = dtcwt_forward(Plane(32, 32), 2, bank());
  for (const Plane& a : activity(pyr).levels)
    for (double v : a.values()) CHECK(v == 0.0);

  pyr.levels[0].subbands[2].real(3, 4) = 3.0;
  pyr.levels[0].subbands[2].imag(3, 4) = 4.0;
  pyr.levels[0].subbands[5].real(3, 4) = -1.0;
  CHECK(activity(pyr).levels[0](3, 4) == doctest::Approx(6.0));

  const DtcwtPyramid p = dtcwt_forward(random_plane(32, 32, 1), 2, bank());
  const auto a = activity(p);
  const auto b = activity(scaled(p, -1.0));
  for (std::size_t l = 0; l < a.levels.size(); ++l) CHECK(a.levels[l] == b.levels[l]);
}

TEST_CASE("segmentation of simple maps") {
  int count = -1;
  const LabelImage flat = segment_level(Plane(10, 10, 2.0), 1.0, &count);
  CHECK(count == 0);
  CHECK(std::all_of(flat.labels.begin(), flat.labels.end(), [](int v) { return v == 0; }));

  Plane blocks(12, 10);
  for (int y = 1; y < 4; ++y)
    for (int x = 1; x < 4; ++x) blocks(x, y) = 1.0;
  for (int y = 6; y < 9; ++y)
    for (int x = 7; x < 10; ++x) blocks(x, y) = 1.0;
  const LabelImage two = segment_level(blocks, 0.5, &count);
  CHECK(count == 2);
  CHECK(two(2, 2) == 1);
  CHECK(two(8, 7) == 2);
  CHECK(two(0, 0) == 0);

  // Diagonal neighbours join.
  Plane diagonal(6, 6);
  diagonal(1, 1) = diagonal(2, 2) = diagonal(3, 3) = 1.0;
  (void)segment_level(diagonal, 0.5, &count);
  CHECK(count == 1);
}

TEST_CASE("segmentation agrees with a flood-fill oracle on random maps") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 8 + trial % 13;
    const int h = 6 + trial % 7;
    Plane p(w, h);
    for (double& v : p.values()) v = u(rng) * u(rng);
    const double k = 0.2 + 0.1 * (trial % 5);

    const double m = mean(p);
    double var = 0.0;
    for (double v : p.values()) var += (v - m) * (v - m);
    const double threshold = m + k * std::sqrt(var / static_cast<double>(p.size()));
    std::vector<bool> mask(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mask[i] = p.values()[i] > threshold;

    int count = -1;
    const LabelImage labels = segment_level(p, k, &count);
    CHECK(count == count_components(mask, w, h));
    for (std::size_t i = 0; i < p.size(); ++i) CHECK((labels.labels[i] != 0) == mask[i]);
    // Labels are numbered in raster-scan discovery order.
    int highest = 0;
    for (int v : labels.labels) {
      CHECK(v <= highest + 1);
      highest = std::max(highest, v);
    }
    CHECK(segment_level(p, k).labels == labels.labels);
  }
}

TEST_CASE("fusing identical pyramids returns that pyramid") {
  const DtcwtPyramid p = dtcwt_forward(random_plane(40, 32, 2), 3, bank());
  for (FusionMode mode : {FusionMode::pixel_max, FusionMode::region}) {
    FusionConfig cfg;
    cfg.mode = mode;
    const DtcwtPyramid fused = fuse_sequence({p, p, p, p}, cfg);
    CHECK(max_abs_difference(fused.lowpass, p.lowpass) < 1e-12);
    for (std::size_t l = 0; l < p.levels.size(); ++l)
      CHECK(fused.levels[l] == p.levels[l]);
  }
}

TEST_CASE("pixel_max picks the larger coefficient and averages the lowpass") {
  const DtcwtPyramid p = dtcwt_forward(random_plane(32, 32, 3), 2, bank());
  DtcwtPyramid q = scaled(p, 2.0);
  for (double& v : q.lowpass.values()) v += 1.0;
  FusionConfig cfg;
  cfg.mode = FusionMode::pixel_max;
  const DtcwtPyramid fused = fuse_sequence({p, q}, cfg);
  for (std::size_t l = 0; l < p.levels.size(); ++l) CHECK(fused.levels[l] == q.levels[l]);
  for (std::size_t i = 0; i < p.lowpass.size(); ++i)
    CHECK(fused.lowpass.values()[i] == doctest::Approx(p.lowpass.values()[i] + 0.5));

  // Equal magnitudes with different phase: the first frame wins.
  const DtcwtPyramid negated = scaled(p, -1.0);
  const DtcwtPyramid tie = fuse_sequence({negated, p}, cfg);
  for (std::size_t l = 0; l < p.levels.size(); ++l) CHECK(tie.levels[l] == negated.levels[l]);
}

TEST_CASE("fusion rejects mismatched pyramids") {
  const DtcwtPyramid a = dtcwt_forward(random_plane(32, 32, 1), 2, bank());
  const DtcwtPyramid b = dtcwt_forward(random_plane(32, 32, 1), 3, bank());
  const DtcwtPyramid c = dtcwt_forward(random_plane(40, 32, 1), 2, bank());
  CHECK_THROWS_WITH_AS((void)fuse_sequence({a, b}, {}), doctest::Contains("shape mismatch"),
                       Error);
  CHECK_THROWS_AS((void)fuse_sequence({a, c}, {}), Error);
  CHECK_THROWS_AS((void)fuse_sequence({}, {}), Error);
  FusionConfig bad;
  bad.levels = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.activity_threshold_k = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS((void)parse_fusion_mode("average"), ConfigError);
}

TEST_CASE("round trips through fuse_frames") {
  const Frame t = textured_frame(64, 48, 8);
  for (FusionMode mode : {FusionMode::pixel_max, FusionMode::region}) {
    FusionConfig cfg;
    cfg.mode = mode;
    CHECK(max_abs_difference(fuse_frames(FrameSequence({t}), cfg, bank()).pixels(), t.pixels()) <
          1e-8);
    CHECK(max_abs_difference(fuse_frames(FrameSequence({t, t, t}), cfg, bank()).pixels(),
                             t.pixels()) < 1e-8);
  }
}

TEST_CASE("fusing complementary half-blurred frames is sharper than either") {
  const Frame sharp = text_card(128, 96, "FUSION HALVES");
  const Plane blurred = gaussian_blur(sharp.pixels(), 2.0);
  Plane left = sharp.pixels(), right = sharp.pixels();
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 128; ++x) (x < 64 ? right : left)(x, y) = blurred(x, y);
  const Frame a(left), b(right);
  for (FusionMode mode : {FusionMode::pixel_max, FusionMode::region}) {
    FusionConfig cfg;
    cfg.mode = mode;
    const Frame fused = clamp_unit(fuse_frames(FrameSequence({a, b}), cfg, bank()));
    CHECK(sharpness(fused) > std::max(sharpness(a), sharpness(b)));
    CHECK(psnr(fused, sharp) > std::max(psnr(a, sharp), psnr(b, sharp)));
  }
}

TEST_CASE("fusion of registered simulator frames beats the temporal mean") {
  TurbulenceParams params;
  params.frames = 50;
  const Frame clean = text_card(128, 128, "ATMOSPHERIC TURBULENCE TEXT");
  const auto sim = degrade(clean, params);
  const FrameSequence reg = register_sequence(select_frames(sim.frames, 0.5), {});
  RegionMap regions;
  const Frame fused = clamp_unit(fuse_frames(reg, {}, bank(), &regions));
  CHECK(psnr(fused, clean) >= psnr(mean_frame(sim.frames), clean));
  CHECK(regions.levels.size() == 4);
  CHECK(regions.region_counts[0] > 0);

  testing_support::TempDir dir("regions");
  dump_region_maps(regions, dir.path());
  for (int l = 1; l <= 4; ++l)
    CHECK(std::filesystem::exists(dir.path() / ("regions_level" + std::to_string(l) + ".png")));
}
