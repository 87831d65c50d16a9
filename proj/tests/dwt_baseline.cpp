#include "dwt_baseline.hpp"

namespace testing_support {
namespace {

using turbfuse::Plane;

// Centred filter along x, then keep even samples (periodic).
Plane analyze_rows(const Plane& in, const std::vector<double>& f) {
  const int w = in.width();
  const int half = static_cast<int>(f.size() / 2);
  Plane out(w / 2, in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < w / 2; ++x) {
      double acc = 0.0;
      for (int k = 0; k < static_cast<int>(f.size()); ++k)
        acc += f[k] * in(((2 * x + k - half) % w + w) % w, y);
      out(x, y) = acc;
    }
  return out;
}

Plane analyze_cols(const Plane& in, const std::vector<double>& f) {
  return turbfuse::transpose(analyze_rows(turbfuse::transpose(in), f));
}

}  // namespace

double DwtLevel::energy() const {
  double e = 0.0;
  for (const Plane& p : details)
    for (double v : p.values()) e += v * v;
  return e;
}

std::vector<DwtLevel> dwt_forward(const Plane& image, int levels,
                                  const turbfuse::FilterBank& bank) {
  std::vector<DwtLevel> out;
  Plane ll = image;
  for (int l = 0; l < levels; ++l) {
    const Plane l_rows = analyze_rows(ll, bank.level1_lo);
    const Plane h_rows = analyze_rows(ll, bank.level1_hi);
    DwtLevel level;
    level.details[0] = analyze_cols(l_rows, bank.level1_hi);
    level.details[1] = analyze_cols(h_rows, bank.level1_lo);
    level.details[2] = analyze_cols(h_rows, bank.level1_hi);
    ll = analyze_cols(l_rows, bank.level1_lo);
    out.push_back(std::move(level));
  }
  return out;
}

Plane circular_shift_x(const Plane& in, int dx) {
  const int w = in.width();
  Plane out(w, in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < w; ++x) out(x, y) = in(((x - dx) % w + w) % w, y);
  return out;
}

}  // namespace testing_support
