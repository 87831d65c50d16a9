#include "turbfuse/metrics.hpp"

#include <cmath>
#include <limits>

#include "turbfuse/error.hpp"
#include "turbfuse/filters.hpp"

namespace turbfuse {
namespace {

void require_same_shape(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                std::to_string(b.height()) + ")");
  }
}

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

// Correlation with the window restricted to fully-covered positions.
Plane filter_valid(const Plane& in, const std::vector<double>& k) {
  const int r = kWindow;
  const int ow = in.width() - r + 1;
  const int oh = in.height() - r + 1;
  Plane tmp(ow, in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < r; ++i) acc += k[i] * in(x + i, y);
      tmp(x, y) = acc;
    }
  Plane out(ow, oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < r; ++i) acc += k[i] * tmp(x, y + i);
      out(x, y) = acc;
    }
  return out;
}

std::vector<double> ssim_window() {
  std::vector<double> k(kWindow);
  double total = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    k[i] = std::exp(-0.5 * d * d / (kWindowSigma * kWindowSigma));
    total += k[i];
  }
  for (double& w : k) w /= total;
  return k;
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
  require_same_shape(a, b, "psnr");
  const auto av = a.pixels().values();
  const auto bv = b.pixels().values();
  double se = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(av.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Frame& a, const Frame& b) {
  require_same_shape(a, b, "ssim");
  if (a.width() < kWindow || a.height() < kWindow)
    throw Error("ssim: image smaller than the 11x11 window");

  const auto k = ssim_window();
  const Plane& pa = a.pixels();
  const Plane& pb = b.pixels();
  Plane aa(pa.width(), pa.height()), bb(pa.width(), pa.height()), ab(pa.width(), pa.height());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    aa.values()[i] = pa.values()[i] * pa.values()[i];
    bb.values()[i] = pb.values()[i] * pb.values()[i];
    ab.values()[i] = pa.values()[i] * pb.values()[i];
  }
  const Plane mu_a = filter_valid(pa, k);
  const Plane mu_b = filter_valid(pb, k);
  const Plane e_aa = filter_valid(aa, k);
  const Plane e_bb = filter_valid(bb, k);
  const Plane e_ab = filter_valid(ab, k);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a.values()[i];
    const double mb = mu_b.values()[i];
    const double va = e_aa.values()[i] - ma * ma;
    const double vb = e_bb.values()[i] - mb * mb;
    const double cov = e_ab.values()[i] - ma * mb;
    total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
             ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
  }
  return total / static_cast<double>(mu_a.size());
}

MetricReport compare(const Frame& a, const Frame& b) { return {psnr(a, b), ssim(a, b)}; }

}  // namespace turbfuse
