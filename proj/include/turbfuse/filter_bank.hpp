#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace turbfuse {

/// Analysis and synthesis taps for the dual-tree transform.
///
/// Level 1 uses an odd-length biorthogonal pair applied without
/// decimation; levels >= 2 use even-length quarter-shift filters where the
/// tree-B filters are the time reverse of the tree-A filters.
struct FilterBank {
  std::string name;

  std::vector<double> level1_lo;
  std::vector<double> level1_hi;
  std::vector<double> level1_lo_syn;
  std::vector<double> level1_hi_syn;

  std::vector<double> qshift_a_lo;
  std::vector<double> qshift_b_lo;
  std::vector<double> qshift_a_hi;
  std::vector<double> qshift_b_hi;
  std::vector<double> qshift_a_lo_syn;
  std::vector<double> qshift_b_lo_syn;
  std::vector<double> qshift_a_hi_syn;
  std::vector<double> qshift_b_hi_syn;
};

/// Embedded sets. Level-1 names: "near_sym_b". Q-shift names: "qshift_b".
[[nodiscard]] FilterBank builtin_filter_bank(std::string_view level1 = "near_sym_b",
                                             std::string_view qshift = "qshift_b");

/// Plain-text bank: one filter per line, the field name followed by
/// whitespace-separated decimal taps. `#` starts a comment.
[[nodiscard]] FilterBank load_filter_bank(const std::filesystem::path& path);
void save_filter_bank(const FilterBank& bank, const std::filesystem::path& path);

/// "level1+qshift" builtin pair (e.g. "near_sym_b+qshift_b") or a path to
/// a text bank.
[[nodiscard]] FilterBank resolve_filter_bank(std::string_view name);

/// Largest 1-D reconstruction error over a set of delta inputs, for the
/// level-1 pair and for the q-shift set.
struct ReconstructionResidual {
  double level1 = 0.0;
  double qshift = 0.0;
};
[[nodiscard]] ReconstructionResidual reconstruction_residual(const FilterBank& bank);

/// Throws ConfigError("filter bank fails perfect reconstruction ...") if
/// either residual reaches 1e-10, or if the tree-B taps are not the time
/// reverse of tree-A within 1e-12.
void validate_filter_bank(const FilterBank& bank);

}  // namespace turbfuse
