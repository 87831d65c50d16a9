#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "turbfuse/deartifact.hpp"
#include "turbfuse/dtcwt.hpp"
#include "turbfuse/error.hpp"
#include "turbfuse/filters.hpp"
#include "turbfuse/simulate.hpp"

using namespace turbfuse;

namespace {

const FilterBank& bank() {
  static const FilterBank b = builtin_filter_bank();
  return b;
}

Frame noisy(const Frame& clean, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  Plane p = clean.pixels();
  for (double& v : p.values()) v = std::clamp(v + n(rng), 0.0, 1.0);
  return Frame(std::move(p));
}

double finest_energy(const Frame& f) { return dtcwt_forward(f, 1, bank()).levels[0].energy(); }

double variance_from(const Frame& f, const Frame& reference) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.pixels().size(); ++i) {
    const double d = f.pixels().values()[i] - reference.pixels().values()[i];
    s += d * d;
  }
  return s / static_cast<double>(f.pixels().size());
}

DeartifactConfig at_quality(int qf) {
  DeartifactConfig c;
  c.quality_factor = qf;
  return c;
}

}  // namespace

TEST_CASE("shrinkage strength") {
  CHECK(shrinkage_strength(100) == 0.0);
  CHECK(shrinkage_strength(20) == 1.0);
  CHECK(shrinkage_strength(60) == doctest::Approx(0.5));
  CHECK(shrinkage_strength(1) == doctest::Approx(99.0 / 80.0));
  CHECK_THROWS_AS((void)shrinkage_strength(0), ConfigError);
  CHECK_THROWS_AS((void)shrinkage_strength(101), ConfigError);
}

TEST_CASE("complex soft threshold keeps the phase") {
  const auto [re, im] = soft_threshold(0.3, 0.0, 0.1);
  CHECK(re == doctest::Approx(0.2));
  CHECK(im == 0.0);

  const auto [a, b] = soft_threshold(3.0, 4.0, 2.5);
  CHECK(std::hypot(a, b) == doctest::Approx(2.5));
  CHECK(std::atan2(b, a) == doctest::Approx(std::atan2(4.0, 3.0)));

  const auto [c, d] = soft_threshold(-0.05, 0.05, 0.1);
  CHECK(c == 0.0);
  CHECK(d == 0.0);
  const auto [e, f] = soft_threshold(0.0, 0.0, 0.0);
  CHECK(e == 0.0);
  CHECK(f == 0.0);
}

TEST_CASE("quality 100 leaves the image unchanged") {
  const Frame t = testing_support::textured_frame(64, 64, 12);
  CHECK(max_abs_difference(deartifact(t, at_quality(100), bank()).pixels(), t.pixels()) < 1e-8);
}

TEST_CASE("shrinkage reduces noise without adding variation") {
  const Frame grey(96, 96, 0.5);
  const Frame input = noisy(grey, 0.05, 3);
  const Frame out = deartifact(input, at_quality(20), bank());
  CHECK(variance_from(out, Frame(96, 96, mean(out.pixels()))) <
        variance_from(input, Frame(96, 96, mean(input.pixels()))));
  CHECK(total_variation(out.pixels()) <= total_variation(input.pixels()));

  const Frame card = noisy(text_card(128, 128, "NOISY CARD"), 0.05, 4);
  const Frame card_out = deartifact(card, at_quality(20), bank());
  CHECK(total_variation(card_out.pixels()) <= total_variation(card.pixels()));
  for (double v : card_out.pixels().values()) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("finest-level energy decreases as quality drops") {
  const Frame input = noisy(testing_support::textured_frame(96, 96, 4), 0.04, 9);
  const double e100 = finest_energy(deartifact(input, at_quality(100), bank()));
  const double e60 = finest_energy(deartifact(input, at_quality(60), bank()));
  const double e20 = finest_energy(deartifact(input, at_quality(20), bank()));
  CHECK(e60 < e100);
  CHECK(e20 < e60);
  CHECK(e20 < finest_energy(input));
}

TEST_CASE("mode none is the exact identity") {
  const Frame t = testing_support::textured_frame(40, 30, 2);
  DeartifactConfig c;
  c.mode = DeartifactMode::none;
  CHECK(deartifact(t, c, bank()) == t);
}

TEST_CASE("external command mode") {
  CHECK(render_command("tool {in} {out} -q {qf} {qf}", "a.png", "b.png", 20) ==
        "tool a.png b.png -q 20 20");

  const Frame t = testing_support::textured_frame(32, 32, 6);
  DeartifactConfig c;
  c.mode = DeartifactMode::external;
  c.external_cmd = "cp {in} {out} # {qf}";
  const Frame copied = deartifact(t, c, bank());
  // The copy goes through an 8-bit PNG.
  CHECK(max_abs_difference(copied.pixels(), t.pixels()) <= 0.5 / 255.0 + 1e-12);

  c.external_cmd = "exit 1 # {in} {out} {qf}";
  try {
    (void)deartifact(t, c, bank());
    FAIL("expected failure");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("exit status 1") != std::string::npos);
    CHECK(msg.find("exit 1 #") != std::string::npos);
  }

  c.external_cmd = "true {in} {out} {qf}";
  CHECK_THROWS_WITH_AS((void)deartifact(t, c, bank()), doctest::Contains("no output"), Error);
}

TEST_CASE("configuration validation") {
  DeartifactConfig c;
  c.quality_factor = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.mode = DeartifactMode::external;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.external_cmd = "tool {in} {out}";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.external_cmd = "tool {in} {out} {qf}";
  CHECK_NOTHROW(c.validate());
  CHECK(parse_deartifact_mode("builtin") == DeartifactMode::builtin_shrinkage);
  CHECK(parse_deartifact_mode("none") == DeartifactMode::none);
  CHECK_THROWS_AS((void)parse_deartifact_mode("jpeg"), ConfigError);
}
