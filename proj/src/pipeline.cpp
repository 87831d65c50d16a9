#include "turbfuse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "turbfuse/dtcwt.hpp"
#include "turbfuse/filter_bank.hpp"
#include "turbfuse/fusion.hpp"
#include "turbfuse/image_io.hpp"
#include "turbfuse/parallel.hpp"
#include "turbfuse/sharpness.hpp"

namespace turbfuse {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

template <typename Fn>
auto run_stage(RunReport& report, const char* stage, Fn&& fn) {
  const auto start = Clock::now();
  auto record = [&] {
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    report.timings.push_back({stage, elapsed.count()});
  };
  try {
    auto result = fn();
    record();
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    record();
    throw StageError(stage, e.what());
  }
}

std::string frame_file(std::size_t i, const char* ext) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%04zu%s", i, ext);
  return name;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

RestoreResult restore(const FrameSequence& seq, const PipelineConfig& config) {
  config.validate();
  const FilterBank bank = resolve_filter_bank(config.filter_bank);

  RestoreResult result;
  RunReport& report = result.report;
  report.frames_in = seq.size();
  report.config_echo = describe(config);
  const bool dumping = config.dump_dir.has_value();

  const FrameSequence selected = run_stage(
      report, "select", [&] { return select_frames(seq, config.select_fraction); });
  report.frames_selected = selected.size();

  const FrameSequence registered = run_stage(report, "register", [&] {
    std::vector<FlowField> flows;
    const bool want_flows = dumping && config.dump_flows;
    FrameSequence out = register_sequence(selected, config.flow, config.register_passes,
                                          want_flows ? &flows : nullptr);
    if (want_flows) {
      const fs::path dir = *config.dump_dir / "flows";
      fs::create_directories(dir);
      for (std::size_t i = 0; i < flows.size(); ++i) write_flo2(flows[i], dir / frame_file(i, ".flo2"));
    }
    return out;
  });

  const Frame fused = run_stage(report, "fuse", [&] {
    const int levels =
        max_dtcwt_levels(registered.width(), registered.height(), config.fusion.levels);
    std::vector<DtcwtPyramid> pyrs(registered.size());
    parallel_for(registered.size(),
                 [&](std::size_t i) { pyrs[i] = dtcwt_forward(registered[i], levels, bank); });
    RegionMap regions;
    const DtcwtPyramid pyr = fuse_sequence(pyrs, config.fusion, &regions);
    if (dumping && config.dump_pyramid) dump_pyramid(pyr, *config.dump_dir / "pyramid");
    if (dumping && config.dump_regions && config.fusion.mode == FusionMode::region)
      dump_region_maps(regions, *config.dump_dir / "regions");
    return dtcwt_inverse(pyr, bank);
  });

  result.image = run_stage(report, "deartifact", [&] {
    return clamp_unit(deartifact(fused, config.deartifact, bank));
  });
  return result;
}

std::optional<Frame> load_ground_truth(const fs::path& seq_dir) {
  const fs::path manifest_path = seq_dir / "manifest.json";
  if (!fs::exists(manifest_path)) return std::nullopt;
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed " + manifest_path.string() + ": " + e.what());
  }
  if (!manifest.contains("clean_image") || !manifest["clean_image"].is_string())
    return std::nullopt;
  return load_frame(seq_dir / manifest["clean_image"].get<std::string>());
}

RestoreResult restore_directory(const fs::path& seq_dir, const PipelineConfig& config) {
  RunReport load_report;
  const FrameSequence seq =
      run_stage(load_report, "load", [&] { return load_sequence(seq_dir, config.pattern); });

  RestoreResult result = restore(seq, config);
  result.report.sequence = seq_dir.filename().string();
  result.report.timings.insert(result.report.timings.begin(), load_report.timings.begin(),
                               load_report.timings.end());

  const auto truth =
      run_stage(result.report, "metrics", [&] { return load_ground_truth(seq_dir); });
  if (truth) {
    if (!truth->same_shape(result.image))
      throw StageError("metrics", "ground truth size differs from the restored image");
    result.report.metrics = compare(result.image, *truth);
  }
  return result;
}

std::vector<fs::path> list_sequences(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a readable directory: " + root.string());
  std::vector<fs::path> dirs;
  for (fs::directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec))
    if (it->is_directory()) dirs.push_back(it->path());
  if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
  std::sort(dirs.begin(), dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return dirs;
}

std::vector<RunReport> run_batch(const fs::path& root, const PipelineConfig& config,
                                 const fs::path& out_dir) {
  config.validate();
  (void)resolve_filter_bank(config.filter_bank);
  const std::vector<fs::path> dirs = list_sequences(root);
  fs::create_directories(out_dir);

  std::vector<RunReport> reports(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    const std::string name = dirs[i].filename().string();
    PipelineConfig local = config;
    if (config.dump_dir) local.dump_dir = *config.dump_dir / name;
    try {
      RestoreResult result = restore_directory(dirs[i], local);
      result.report.sequence = name;
      try {
        save_frame(result.image, out_dir / (name + ".png"));
      } catch (const std::exception& e) {
        throw StageError("write", e.what());
      }
      reports[i] = std::move(result.report);
    } catch (const std::exception& e) {
      RunReport& failed = reports[i];
      failed.sequence = name;
      failed.ok = false;
      failed.config_echo = describe(config);
      const auto* stage_error = dynamic_cast<const StageError*>(&e);
      failed.failed_stage = stage_error ? stage_error->stage() : "unknown";
      failed.error = e.what();
    }
  });

  write_report_csv(reports, out_dir / "report.csv");
  write_timings_csv(reports, out_dir / "timings.csv");
  std::ofstream echo(out_dir / "config.txt");
  echo << describe(config);
  return reports;
}

void write_report_csv(const std::vector<RunReport>& reports, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  out << "sequence,status,failed_stage,frames_in,frames_selected,psnr,ssim,error\n";
  for (const auto& r : reports) {
    out << csv_field(r.sequence) << ',' << (r.ok ? "ok" : "failed") << ',' << r.failed_stage
        << ',' << r.frames_in << ',' << r.frames_selected << ',';
    if (r.metrics)
      out << r.metrics->psnr << ',' << r.metrics->ssim;
    else
      out << ',';
    out << ',' << csv_field(r.error) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_timings_csv(const std::vector<RunReport>& reports, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(6);
  out << "sequence,stage,seconds\n";
  for (const auto& r : reports)
    for (const auto& t : r.timings) out << csv_field(r.sequence) << ',' << t.stage << ',' << t.seconds << '\n';
}

void analyze(const fs::path& seq_dir, const fs::path& out_csv, std::string_view pattern) {
  export_series_csv(sharpness_series(load_sequence(seq_dir, pattern)), out_csv);
}

}  // namespace turbfuse
