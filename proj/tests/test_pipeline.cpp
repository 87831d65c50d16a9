#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "turbfuse/config.hpp"
#include "turbfuse/error.hpp"
#include "turbfuse/image_io.hpp"
#include "turbfuse/pipeline.hpp"
#include "turbfuse/simulate.hpp"

using namespace turbfuse;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

void write_sequence(const fs::path& dir, std::uint64_t seed, int frames = 8) {
  const Frame clean = text_card(64, 64, "SEQ");
  TurbulenceParams p;
  p.frames = frames;
  p.seed = seed;
  save_simulation(degrade(clean, p), clean, p, dir);
}

PipelineConfig quick_config() {
  PipelineConfig c;
  c.fusion.levels = 3;
  c.flow.iterations = 20;
  return c;
}

}  // namespace

TEST_CASE("identical clean frames restore to themselves") {
  const Frame clean = text_card(64, 64, "SAME");
  PipelineConfig c;
  c.deartifact.mode = DeartifactMode::none;
  const auto result = restore(FrameSequence({clean, clean, clean, clean}), c);
  CHECK(max_abs_difference(result.image.pixels(), clean.pixels()) < 1e-6);
  CHECK(result.report.frames_in == 4);
  CHECK(result.report.frames_selected == 2);
  REQUIRE(result.report.timings.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(result.report.timings[i].stage == kStages[i]);
}

TEST_CASE("a fraction that keeps one frame still completes") {
  TurbulenceParams p;
  p.frames = 5;
  const auto sim = degrade(text_card(64, 64, "ONE"), p);
  PipelineConfig c;
  c.select_fraction = 0.1;
  const auto result = restore(sim.frames, c);
  CHECK(result.report.frames_selected == 1);
  CHECK(result.image.width() == 64);
}

TEST_CASE("deartifact none only changes the final stage") {
  TurbulenceParams p;
  p.frames = 6;
  const auto sim = degrade(text_card(64, 64, "NONE"), p);
  PipelineConfig with = quick_config();
  PipelineConfig without = with;
  without.deartifact.mode = DeartifactMode::none;
  const Frame a = restore(sim.frames, with).image;
  const Frame b = restore(sim.frames, without).image;
  CHECK(a != b);
  CHECK(max_abs_difference(deartifact(b, with.deartifact, builtin_filter_bank()).pixels(),
                           a.pixels()) < 1e-12);
}

TEST_CASE("stage failures are tagged") {
  PipelineConfig c;
  c.fusion.levels = 4;
  // 12x12 is below the smallest frame the flow estimator accepts.
  try {
    (void)restore(FrameSequence({Frame(12, 12), Frame(12, 12)}), c);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "register");
    CHECK(std::string(e.what()).rfind("register: ", 0) == 0);
  }
  c.select_fraction = 2.0;
  CHECK_THROWS_AS((void)restore(FrameSequence({Frame(32, 32)}), c), ConfigError);
}

TEST_CASE("batch run over simulated sequences") {
  testing_support::TempDir dir("batch");
  for (int i = 0; i < 3; ++i) write_sequence(dir.path() / "in" / ("seq" + std::to_string(i)), i);
  const auto reports = run_batch(dir.path() / "in", quick_config(), dir.path() / "out");
  REQUIRE(reports.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(reports[i].ok);
    CHECK(reports[i].sequence == "seq" + std::to_string(i));
    CHECK(reports[i].metrics.has_value());
    CHECK(fs::exists(dir.path() / "out" / ("seq" + std::to_string(i) + ".png")));
  }
  const auto lines = read_lines(dir.path() / "out" / "report.csv");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "sequence,status,failed_stage,frames_in,frames_selected,psnr,ssim,error");
  const auto row = split_csv(lines[1]);
  REQUIRE(row.size() == 8);
  CHECK(row[1] == "ok");
  CHECK(row[3] == "8");
  CHECK(row[4] == "4");
  CHECK(std::stod(row[5]) == doctest::Approx(reports[0].metrics->psnr).epsilon(1e-15));

  const auto timings = read_lines(dir.path() / "out" / "timings.csv");
  CHECK(timings[0] == "sequence,stage,seconds");
  CHECK(timings.size() == 1 + 3 * 6);
  CHECK(fs::exists(dir.path() / "out" / "config.txt"));
}

TEST_CASE("one corrupt sequence does not stop the batch") {
  testing_support::TempDir dir("corrupt");
  write_sequence(dir.path() / "in" / "a", 1);
  write_sequence(dir.path() / "in" / "c", 2);
  fs::create_directories(dir.path() / "in" / "b");
  {
    std::ofstream bad(dir.path() / "in" / "b" / "frame_0000.png");
    bad << "not a png";
  }
  const auto reports = run_batch(dir.path() / "in", quick_config(), dir.path() / "out");
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].ok);
  CHECK_FALSE(reports[1].ok);
  CHECK(reports[1].failed_stage == "load");
  CHECK(reports[1].error.find("frame_0000.png") != std::string::npos);
  CHECK(reports[2].ok);
  CHECK(fs::exists(dir.path() / "out" / "a.png"));
  CHECK_FALSE(fs::exists(dir.path() / "out" / "b.png"));
  CHECK(fs::exists(dir.path() / "out" / "c.png"));

  const auto row = split_csv(read_lines(dir.path() / "out" / "report.csv")[2]);
  CHECK(row[0] == "b");
  CHECK(row[1] == "failed");
  CHECK(row[2] == "load");
}

TEST_CASE("a batch of 400 sequences reports every one") {
  testing_support::TempDir dir("many");
  for (int i = 0; i < 400; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "s%03d", i);
    fs::create_directories(dir.path() / "in" / name);
  }
  const auto reports = run_batch(dir.path() / "in", quick_config(), dir.path() / "out");
  CHECK(reports.size() == 400);
  CHECK(reports[399].sequence == "s399");
  CHECK(read_lines(dir.path() / "out" / "report.csv").size() == 401);
  CHECK_THROWS_AS((void)run_batch(dir.path() / "missing", quick_config(), dir.path() / "o2"),
                  IoError);
}

TEST_CASE("analyze writes one row per frame") {
  testing_support::TempDir dir("analyze");
  fs::create_directories(dir.path() / "flat");
  for (int i = 0; i < 4; ++i)
    save_frame(Frame(32, 32, 0.5), dir.path() / "flat" / ("f" + std::to_string(i) + ".png"));
  analyze(dir.path() / "flat", dir.path() / "flat.csv");
  const auto lines = read_lines(dir.path() / "flat.csv");
  REQUIRE(lines.size() == 5);
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(std::stod(split_csv(lines[i])[2]) == 0.0);

  write_sequence(dir.path() / "sim", 42, 30);
  analyze(dir.path() / "sim", dir.path() / "sim.csv");
  const auto sim_lines = read_lines(dir.path() / "sim.csv");
  CHECK(sim_lines.size() == 31);
  std::vector<double> raw;
  for (std::size_t i = 1; i < sim_lines.size(); ++i) raw.push_back(std::stod(split_csv(sim_lines[i])[1]));
  double m = 0.0, v = 0.0;
  for (double r : raw) m += r / raw.size();
  for (double r : raw) v += (r - m) * (r - m) / raw.size();
  CHECK(std::sqrt(v) / m > 0.01);
}

TEST_CASE("settings and config files") {
  PipelineConfig c;
  apply_setting(c, "flow-alpha", "0.2");
  apply_setting(c, "fusion_mode", "\"pixel_max\"");
  apply_setting(c, "flow_levels", "auto");
  apply_setting(c, "qf", "35");
  CHECK(c.flow.alpha == 0.2);
  CHECK(c.fusion.mode == FusionMode::pixel_max);
  CHECK_FALSE(c.flow.pyramid_levels.has_value());
  CHECK(c.deartifact.quality_factor == 35);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "flow_alpha", "fast"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "qf", "20x"), ConfigError);

  testing_support::TempDir dir("config");
  {
    std::ofstream out(dir.path() / "run.toml");
    out << "# restore settings\n[pipeline]\nselect_fraction = 0.25\n"
           "deartifact = \"none\"  # keep raw\nfilter_bank = \"near_sym_b+qshift_b\"\n\n";
  }
  PipelineConfig f;
  apply_config_file(f, dir.path() / "run.toml");
  CHECK(f.select_fraction == 0.25);
  CHECK(f.deartifact.mode == DeartifactMode::none);
  {
    std::ofstream out(dir.path() / "bad.toml");
    out << "select_fraction = 0.5\nwidth 12\n";
  }
  CHECK_THROWS_WITH_AS(apply_config_file(f, dir.path() / "bad.toml"), doctest::Contains(":2"),
                       ConfigError);
  CHECK_THROWS_AS(apply_config_file(f, dir.path() / "nope.toml"), Error);
}

TEST_CASE("describe round-trips through apply_setting") {
  PipelineConfig c;
  c.select_fraction = 0.3;
  c.flow.alpha = 0.123456789;
  c.flow.pyramid_levels = 2;
  c.fusion.mode = FusionMode::pixel_max;
  c.deartifact.quality_factor = 77;
  c.register_passes = 2;
  const std::string text = describe(c);

  PipelineConfig back;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    apply_setting(back, line.substr(0, eq), line.substr(eq + 1));
  }
  CHECK(describe(back) == text);
  CHECK(back.flow.alpha == c.flow.alpha);
  CHECK(back.flow.pyramid_levels == 2);
}
