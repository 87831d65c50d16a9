#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "turbfuse/deartifact.hpp"
#include "turbfuse/flow.hpp"
#include "turbfuse/fusion.hpp"

namespace turbfuse {

struct PipelineConfig {
  double select_fraction = 0.5;
  FlowParams flow;
  int register_passes = 1;
  FusionConfig fusion;
  DeartifactConfig deartifact;
  /// "level1+qshift" builtin pair or a path to a text filter bank.
  std::string filter_bank = "near_sym_b+qshift_b";
  /// Shell glob for frame files inside a sequence directory.
  std::string pattern = "*.png";

  /// Debug dumps go under dump_dir (per sequence in batch mode).
  std::optional<std::filesystem::path> dump_dir;
  bool dump_flows = false;
  bool dump_pyramid = false;
  bool dump_regions = false;

  void validate() const;
};

/// Apply one `key = value` setting. Keys use underscores or dashes
/// interchangeably (flow_alpha, flow-alpha).
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Flat TOML-style file: `key = value` lines, `#` comments, optional
/// double quotes around strings, `[section]` headers ignored.
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

/// One `key=value` per line, in a fixed order; round-trips through
/// apply_setting.
[[nodiscard]] std::string describe(const PipelineConfig& config);

}  // namespace turbfuse
