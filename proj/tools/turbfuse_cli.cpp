#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "turbfuse/config.hpp"
#include "turbfuse/image_io.hpp"
#include "turbfuse/metrics.hpp"
#include "turbfuse/pipeline.hpp"
#include "turbfuse/simulate.hpp"

namespace fs = std::filesystem;
using namespace turbfuse;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// Flag values are kept as strings so that only flags actually given
// override the config file.
struct PipelineFlags {
  std::optional<std::string> config_file;
  std::vector<std::pair<std::string, std::optional<std::string>>> values;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_file, "key = value config file (flags override it)");
    const std::pair<const char*, const char*> options[] = {
        {"select-fraction", "fraction of sharpest frames kept, in (0,1]"},
        {"flow-alpha", "Horn-Schunck smoothness weight"},
        {"flow-iters", "Jacobi iterations per warp"},
        {"flow-levels", "flow pyramid levels or 'auto'"},
        {"register-passes", "registration passes"},
        {"fusion-mode", "pixel_max or region"},
        {"fusion-levels", "DT-CWT levels used for fusion"},
        {"region-threshold-k", "feature threshold: mean + k * std of activity"},
        {"deartifact", "builtin, external or none"},
        {"qf", "quality factor in [1,100]"},
        {"deartifact-cmd", "external command with {in}, {out}, {qf}"},
        {"filter-bank", "builtin pair (near_sym_b+qshift_b) or filter file"},
        {"pattern", "frame file glob inside a sequence directory"},
        {"dump-dir", "directory for debug dumps"},
    };
    values.reserve(std::size(options));
    for (const auto& [name, help] : options) {
      values.emplace_back(name, std::nullopt);
      app->add_option(std::string("--") + name, values.back().second, help);
    }
    app->add_flag("--dump-flows", dump_flows, "write FLO2 flow fields");
    app->add_flag("--dump-pyramid", dump_pyramid, "write the fused DT-CWT pyramid");
    app->add_flag("--dump-regions", dump_regions, "write region label maps");
  }

  PipelineConfig build() const {
    PipelineConfig config;
    if (config_file) apply_config_file(config, *config_file);
    for (const auto& [key, value] : values)
      if (value) apply_setting(config, key, *value);
    if (dump_flows) config.dump_flows = true;
    if (dump_pyramid) config.dump_pyramid = true;
    if (dump_regions) config.dump_regions = true;
    if ((config.dump_flows || config.dump_pyramid || config.dump_regions) && !config.dump_dir)
      config.dump_dir = "debug";
    config.validate();
    return config;
  }

  bool dump_flows = false;
  bool dump_pyramid = false;
  bool dump_regions = false;
};

void print_metrics(const MetricReport& m) {
  std::cout << std::setprecision(17) << "psnr=" << m.psnr << " ssim=" << m.ssim << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turbulence mitigation by frame selection, registration and DT-CWT fusion"};
  app.require_subcommand(1);

  PipelineFlags restore_flags;
  std::string restore_dir;
  std::string restore_out = "restored.png";
  auto* restore_cmd = app.add_subcommand("restore", "restore one sequence directory");
  restore_cmd->add_option("seq_dir", restore_dir, "directory of frames")->required();
  restore_cmd->add_option("-o,--output", restore_out, "output PNG");
  restore_flags.add_to(restore_cmd);

  PipelineFlags batch_flags;
  std::string batch_root;
  std::string batch_out = "out";
  auto* batch_cmd = app.add_subcommand("batch", "restore every sequence under a root directory");
  batch_cmd->add_option("root", batch_root, "one subdirectory per sequence")->required();
  batch_cmd->add_option("-o,--output", batch_out, "output directory");
  batch_flags.add_to(batch_cmd);

  TurbulenceParams sim;
  std::string sim_out = "sim";
  std::string sim_text = "ATMOSPHERIC TURBULENCE TEXT";
  std::string sim_clean;
  int sim_width = 128;
  int sim_height = 128;
  bool sim_flows = false;
  auto* sim_cmd = app.add_subcommand("simulate", "write a synthetic degraded sequence");
  sim_cmd->add_option("-o,--output", sim_out, "sequence directory");
  sim_cmd->add_option("--clean", sim_clean, "clean image (default: a rendered text card)");
  sim_cmd->add_option("--text", sim_text, "text card content");
  sim_cmd->add_option("--width", sim_width, "text card width");
  sim_cmd->add_option("--height", sim_height, "text card height");
  sim_cmd->add_option("--frames", sim.frames, "frame count");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_option("--warp-amplitude", sim.warp_amplitude, "peak tilt in pixels");
  sim_cmd->add_option("--warp-smoothness", sim.warp_smoothness, "tilt correlation sigma");
  sim_cmd->add_option("--blur-min", sim.blur_sigma_min, "minimum blur sigma");
  sim_cmd->add_option("--blur-max", sim.blur_sigma_max, "maximum blur sigma");
  sim_cmd->add_option("--noise", sim.noise_sigma, "noise sigma");
  sim_cmd->add_flag("--dump-flows", sim_flows, "write ground-truth FLO2 flows");

  std::string analyze_dir;
  std::string analyze_out = "sharpness.csv";
  std::string analyze_pattern = "*.png";
  auto* analyze_cmd = app.add_subcommand("analyze", "write the per-frame sharpness series");
  analyze_cmd->add_option("seq_dir", analyze_dir, "directory of frames")->required();
  analyze_cmd->add_option("-o,--output", analyze_out, "CSV path");
  analyze_cmd->add_option("--pattern", analyze_pattern, "frame file glob");

  std::string metric_a;
  std::string metric_b;
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR and SSIM between two images");
  metrics_cmd->add_option("a", metric_a, "first image")->required();
  metrics_cmd->add_option("b", metric_b, "second image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*restore_cmd) {
      const PipelineConfig config = restore_flags.build();
      const RestoreResult result = restore_directory(restore_dir, config);
      save_frame(result.image, restore_out);
      std::cout << "frames " << result.report.frames_selected << "/" << result.report.frames_in
                << '\n';
      for (const auto& t : result.report.timings)
        std::cout << t.stage << " " << std::fixed << std::setprecision(3) << t.seconds << "s\n"
                  << std::defaultfloat;
      if (result.report.metrics) print_metrics(*result.report.metrics);
      return 0;
    }
    if (*batch_cmd) {
      const PipelineConfig config = batch_flags.build();
      const auto reports = run_batch(batch_root, config, batch_out);
      std::size_t failed = 0;
      for (const auto& r : reports) {
        if (r.ok) continue;
        ++failed;
        std::cerr << r.sequence << ": " << r.error << '\n';
      }
      std::cout << reports.size() - failed << "/" << reports.size() << " sequences restored\n";
      return failed == 0 ? 0 : kExitFailure;
    }
    if (*sim_cmd) {
      const Frame clean =
          sim_clean.empty() ? text_card(sim_width, sim_height, sim_text) : load_frame(sim_clean);
      const SimulatedSequence out = degrade(clean, sim);
      save_simulation(out, clean, sim, sim_out, sim_flows, sim_clean.empty() ? sim_text : "");
      std::cout << "wrote " << out.frames.size() << " frames to " << sim_out << '\n';
      return 0;
    }
    if (*analyze_cmd) {
      analyze(analyze_dir, analyze_out, analyze_pattern);
      return 0;
    }
    if (*metrics_cmd) {
      print_metrics(compare(load_frame(metric_a), load_frame(metric_b)));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
