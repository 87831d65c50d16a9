#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "turbfuse/config.hpp"
#include "turbfuse/error.hpp"
#include "turbfuse/frame.hpp"
#include "turbfuse/metrics.hpp"

namespace turbfuse {

/// Stage names in execution order.
inline constexpr const char* kStages[] = {"select", "register", "fuse", "deartifact"};

/// A failure inside restore(), tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::string sequence;
  std::vector<StageTiming> timings;
  std::size_t frames_in = 0;
  std::size_t frames_selected = 0;
  std::optional<MetricReport> metrics;
  std::string config_echo;
  bool ok = true;
  std::string failed_stage;
  std::string error;
};

struct RestoreResult {
  Frame image;
  RunReport report;
};

/// select -> register -> fuse -> deartifact. The result is clamped to [0,1].
/// Debug dumps (if enabled) are written under config.dump_dir.
[[nodiscard]] RestoreResult restore(const FrameSequence& seq, const PipelineConfig& config);

/// Ground truth for a sequence directory: the "clean_image" entry of its
/// manifest.json, resolved relative to the directory. nullopt when absent.
[[nodiscard]] std::optional<Frame> load_ground_truth(const std::filesystem::path& seq_dir);

/// Load, restore and score one sequence directory. Failures propagate.
[[nodiscard]] RestoreResult restore_directory(const std::filesystem::path& seq_dir,
                                              const PipelineConfig& config);

/// Sorted immediate subdirectories of `root`. Throws IoError if `root`
/// is not a readable directory.
[[nodiscard]] std::vector<std::filesystem::path> list_sequences(const std::filesystem::path& root);

/// Restore every sequence under `root` into <out>/<name>.png and write
/// <out>/report.csv plus <out>/timings.csv. A failing sequence is recorded
/// and skipped. Reports come back in sequence-name order.
std::vector<RunReport> run_batch(const std::filesystem::path& root, const PipelineConfig& config,
                                 const std::filesystem::path& out_dir);

void write_report_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path);
void write_timings_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path);

/// Sharpness series of a sequence directory as CSV.
void analyze(const std::filesystem::path& seq_dir, const std::filesystem::path& out_csv,
             std::string_view pattern = "*.png");

}  // namespace turbfuse
