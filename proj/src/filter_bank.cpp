#include "turbfuse/filter_bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "column_filters.hpp"
#include "turbfuse/error.hpp"

namespace turbfuse {
namespace {

// Near-symmetric 13/19-tap biorthogonal pair and 14-tap quarter-shift set
// (Kingsbury). Tree-B q-shift taps are the time reverse of tree A.
constexpr double kNearSymBLo[] = {
    -0.0017578125, 0.0, 0.022265625,
    -0.046875, -0.0482421875, 0.296875,
    0.55546875, 0.296875, -0.0482421875,
    -0.046875, 0.022265625, 0.0,
    -0.0017578125};
constexpr double kNearSymBHi[] = {
    -7.062639508928571e-05, 0.0, 0.0013419015066964285,
    -0.0018833705357142855, -0.007156808035714285, 0.023856026785714284,
    0.05564313616071428, -0.05168805803571428, -0.29975760323660716,
    0.5594308035714286, -0.29975760323660716, -0.05168805803571428,
    0.05564313616071428, 0.023856026785714284, -0.007156808035714285,
    -0.0018833705357142855, 0.0013419015066964285, 0.0,
    -7.062639508928571e-05};
constexpr double kNearSymBLoSyn[] = {
    7.062639508928571e-05, 0.0, -0.0013419015066964285,
    -0.0018833705357142855, 0.007156808035714285, 0.023856026785714284,
    -0.05564313616071428, -0.05168805803571428, 0.29975760323660716,
    0.5594308035714286, 0.29975760323660716, -0.05168805803571428,
    -0.05564313616071428, 0.023856026785714284, 0.007156808035714285,
    -0.0018833705357142855, -0.0013419015066964285, 0.0,
    7.062639508928571e-05};
constexpr double kNearSymBHiSyn[] = {
    -0.0017578125, 0.0, 0.022265625,
    0.046875, -0.0482421875, -0.296875,
    0.55546875, -0.296875, -0.0482421875,
    0.046875, 0.022265625, 0.0,
    -0.0017578125};
constexpr double kQshiftBALo[] = {
    0.003253142763653182, -0.00388321199915849, 0.03466034684485349,
    -0.03887280126882779, -0.11720388769911527, 0.27529538466888204,
    0.7561456438925225, 0.5688104207121227, 0.011866092033797,
    -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
    -0.005439475937274115, -0.004556895628475491};
constexpr double kQshiftBBLo[] = {
    -0.004556895628475491, -0.005439475937274115, 0.01702522388155399,
    0.023825384794920298, -0.1067118046866654, 0.011866092033797,
    0.5688104207121227, 0.7561456438925225, 0.27529538466888204,
    -0.11720388769911527, -0.03887280126882779, 0.03466034684485349,
    -0.00388321199915849, 0.003253142763653182};
constexpr double kQshiftBAHi[] = {
    -0.004556895628475491, 0.005439475937274115, 0.01702522388155399,
    -0.023825384794920298, -0.1067118046866654, -0.011866092033797,
    0.5688104207121227, -0.7561456438925225, 0.27529538466888204,
    0.11720388769911527, -0.03887280126882779, -0.03466034684485349,
    -0.00388321199915849, -0.003253142763653182};
constexpr double kQshiftBBHi[] = {
    -0.003253142763653182, -0.00388321199915849, -0.03466034684485349,
    -0.03887280126882779, 0.11720388769911527, 0.27529538466888204,
    -0.7561456438925225, 0.5688104207121227, -0.011866092033797,
    -0.1067118046866654, -0.023825384794920298, 0.01702522388155399,
    0.005439475937274115, -0.004556895628475491};
constexpr double kQshiftBALoSyn[] = {
    -0.004556895628475491, -0.005439475937274115, 0.01702522388155399,
    0.023825384794920298, -0.1067118046866654, 0.011866092033797,
    0.5688104207121227, 0.7561456438925225, 0.27529538466888204,
    -0.11720388769911527, -0.03887280126882779, 0.03466034684485349,
    -0.00388321199915849, 0.003253142763653182};
constexpr double kQshiftBBLoSyn[] = {
    0.003253142763653182, -0.00388321199915849, 0.03466034684485349,
    -0.03887280126882779, -0.11720388769911527, 0.27529538466888204,
    0.7561456438925225, 0.5688104207121227, 0.011866092033797,
    -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
    -0.005439475937274115, -0.004556895628475491};
constexpr double kQshiftBAHiSyn[] = {
    -0.003253142763653182, -0.00388321199915849, -0.03466034684485349,
    -0.03887280126882779, 0.11720388769911527, 0.27529538466888204,
    -0.7561456438925225, 0.5688104207121227, -0.011866092033797,
    -0.1067118046866654, -0.023825384794920298, 0.01702522388155399,
    0.005439475937274115, -0.004556895628475491};
constexpr double kQshiftBBHiSyn[] = {
    -0.004556895628475491, 0.005439475937274115, 0.01702522388155399,
    -0.023825384794920298, -0.1067118046866654, -0.011866092033797,
    0.5688104207121227, -0.7561456438925225, 0.27529538466888204,
    0.11720388769911527, -0.03887280126882779, -0.03466034684485349,
    -0.00388321199915849, -0.003253142763653182};

template <std::size_t N>
std::vector<double> taps(const double (&a)[N]) {
  return {a, a + N};
}

using Field = std::vector<double> FilterBank::*;

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> kFields{
      {"level1_lo", &FilterBank::level1_lo},
      {"level1_hi", &FilterBank::level1_hi},
      {"level1_lo_syn", &FilterBank::level1_lo_syn},
      {"level1_hi_syn", &FilterBank::level1_hi_syn},
      {"qshift_a_lo", &FilterBank::qshift_a_lo},
      {"qshift_b_lo", &FilterBank::qshift_b_lo},
      {"qshift_a_hi", &FilterBank::qshift_a_hi},
      {"qshift_b_hi", &FilterBank::qshift_b_hi},
      {"qshift_a_lo_syn", &FilterBank::qshift_a_lo_syn},
      {"qshift_b_lo_syn", &FilterBank::qshift_b_lo_syn},
      {"qshift_a_hi_syn", &FilterBank::qshift_a_hi_syn},
      {"qshift_b_hi_syn", &FilterBank::qshift_b_hi_syn},
  };
  return kFields;
}

constexpr double kReconstructionTolerance = 1e-10;
constexpr double kReversalTolerance = 1e-12;
constexpr int kProbeLength = 64;

double delta_residual(const std::function<Plane(const Plane&)>& round_trip) {
  double worst = 0.0;
  for (int pos : {0, 1, 2, 3, 17, 30, 31, 32, 45, 60, 61, 62, 63}) {
    Plane delta(1, kProbeLength);
    delta(0, pos) = 1.0;
    const Plane back = round_trip(delta);
    if (!back.same_shape(delta)) return INFINITY;
    worst = std::max(worst, max_abs_difference(back, delta));
  }
  return worst;
}

bool is_reverse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[a.size() - 1 - i]) > kReversalTolerance) return false;
  return true;
}

}  // namespace

FilterBank builtin_filter_bank(std::string_view level1, std::string_view qshift) {
  FilterBank bank;
  if (level1 == "near_sym_b") {
    bank.level1_lo = taps(kNearSymBLo);
    bank.level1_hi = taps(kNearSymBHi);
    bank.level1_lo_syn = taps(kNearSymBLoSyn);
    bank.level1_hi_syn = taps(kNearSymBHiSyn);
  } else {
    throw ConfigError("unknown level-1 filter set '" + std::string(level1) + "'");
  }
  if (qshift == "qshift_b") {
    bank.qshift_a_lo = taps(kQshiftBALo);
    bank.qshift_b_lo = taps(kQshiftBBLo);
    bank.qshift_a_hi = taps(kQshiftBAHi);
    bank.qshift_b_hi = taps(kQshiftBBHi);
    bank.qshift_a_lo_syn = taps(kQshiftBALoSyn);
    bank.qshift_b_lo_syn = taps(kQshiftBBLoSyn);
    bank.qshift_a_hi_syn = taps(kQshiftBAHiSyn);
    bank.qshift_b_hi_syn = taps(kQshiftBBHiSyn);
  } else {
    throw ConfigError("unknown q-shift filter set '" + std::string(qshift) + "'");
  }
  bank.name = std::string(level1) + "+" + std::string(qshift);
  validate_filter_bank(bank);
  return bank;
}

FilterBank load_filter_bank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open filter bank " + path.string());
  FilterBank bank;
  bank.name = path.string();
  std::map<std::string, Field> lookup(fields().begin(), fields().end());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    const auto it = lookup.find(key);
    if (it == lookup.end())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unknown filter '" +
                        key + "'");
    std::vector<double>& dst = bank.*(it->second);
    dst.clear();
    std::string token;
    while (ss >> token) {
      try {
        std::size_t used = 0;
        dst.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad tap '" + token +
                          "'");
      }
    }
  }
  for (const auto& [name, field] : fields())
    if ((bank.*field).empty()) throw ConfigError(path.string() + ": missing filter " + name);
  validate_filter_bank(bank);
  return bank;
}

void save_filter_bank(const FilterBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << bank.name << '\n';
  out.precision(17);
  for (const auto& [name, field] : fields()) {
    out << name;
    for (double t : bank.*field) out << ' ' << t;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

FilterBank resolve_filter_bank(std::string_view name) {
  if (const auto plus = name.find('+'); plus != std::string_view::npos &&
                                        !std::filesystem::exists(std::string(name)))
    return builtin_filter_bank(name.substr(0, plus), name.substr(plus + 1));
  return load_filter_bank(std::string(name));
}

ReconstructionResidual reconstruction_residual(const FilterBank& b) {
  using detail::add;
  using detail::coldfilt;
  using detail::colfilter;
  using detail::colifilt;
  ReconstructionResidual r;
  r.level1 = delta_residual([&](const Plane& x) {
    return add(colfilter(colfilter(x, b.level1_lo), b.level1_lo_syn),
               colfilter(colfilter(x, b.level1_hi), b.level1_hi_syn));
  });
  r.qshift = delta_residual([&](const Plane& x) {
    return add(colifilt(coldfilt(x, b.qshift_b_lo, b.qshift_a_lo), b.qshift_b_lo_syn,
                        b.qshift_a_lo_syn),
               colifilt(coldfilt(x, b.qshift_b_hi, b.qshift_a_hi), b.qshift_b_hi_syn,
                        b.qshift_a_hi_syn));
  });
  return r;
}

void validate_filter_bank(const FilterBank& b) {
  for (const auto* f : {&b.level1_lo, &b.level1_hi, &b.level1_lo_syn, &b.level1_hi_syn})
    if (f->size() % 2 == 0)
      throw ConfigError("filter bank " + b.name + ": level-1 filters must have odd length");
  const std::size_t q = b.qshift_a_lo.size();
  for (const auto* f : {&b.qshift_a_lo, &b.qshift_b_lo, &b.qshift_a_hi, &b.qshift_b_hi,
                        &b.qshift_a_lo_syn, &b.qshift_b_lo_syn, &b.qshift_a_hi_syn,
                        &b.qshift_b_hi_syn})
    if (f->size() != q || q % 2 != 0 || q == 0)
      throw ConfigError("filter bank " + b.name +
                        ": q-shift filters must share one even length");
  const auto r = reconstruction_residual(b);
  if (!(r.level1 < kReconstructionTolerance) || !(r.qshift < kReconstructionTolerance)) {
    std::ostringstream msg;
    msg << "filter bank fails perfect reconstruction (" << b.name << ": level-1 residual "
        << r.level1 << ", q-shift residual " << r.qshift << ")";
    throw ConfigError(msg.str());
  }
  if (!is_reverse(b.qshift_a_lo, b.qshift_b_lo) || !is_reverse(b.qshift_a_hi, b.qshift_b_hi) ||
      !is_reverse(b.qshift_a_lo_syn, b.qshift_b_lo_syn) ||
      !is_reverse(b.qshift_a_hi_syn, b.qshift_b_hi_syn))
    throw ConfigError("filter bank " + b.name + ": q-shift trees are not time reverses");
}

}  // namespace turbfuse
