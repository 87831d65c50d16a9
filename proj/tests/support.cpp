#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include "turbfuse/filters.hpp"

namespace testing_support {

using turbfuse::Frame;
using turbfuse::Plane;

Plane random_plane(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Plane p(width, height);
  for (double& v : p.values()) v = dist(rng);
  return p;
}

Frame textured_frame(int width, int height, std::uint64_t seed, double sigma) {
  Plane p = turbfuse::gaussian_blur(random_plane(width, height, seed), sigma);
  const auto [lo, hi] = std::minmax_element(p.values().begin(), p.values().end());
  const double a = *lo;
  const double range = *hi - *lo;
  for (double& v : p.values()) v = (v - a) / range;
  return Frame(std::move(p));
}

Frame grating(int width, int height, double edge_degrees, double period) {
  // Wave vector in row-down image coordinates.
  const double theta = (90.0 - edge_degrees) * std::numbers::pi / 180.0;
  const double k = 2.0 * std::numbers::pi / period;
  Plane p(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      p(x, y) = 0.5 + 0.4 * std::cos(k * (x * std::cos(theta) + y * std::sin(theta)));
  return Frame(std::move(p));
}

Frame vertical_bar(int width, int height, int x0, int x1) {
  Plane p(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = x0; x < x1; ++x) p(x, y) = 1.0;
  return Frame(std::move(p));
}

Frame translate(const Frame& in, int dx, int dy) {
  Plane p(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) p(x, y) = in.pixels().clamped(x - dx, y - dy);
  return Frame(std::move(p));
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("turbfuse_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

double mean_temporal_variance(const turbfuse::FrameSequence& seq) {
  const std::size_t pixels = seq[0].pixels().size();
  const double n = static_cast<double>(seq.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pixels; ++i) {
    double s = 0.0, s2 = 0.0;
    for (const Frame& f : seq) {
      const double v = f.pixels().values()[i];
      s += v;
      s2 += v * v;
    }
    const double m = s / n;
    total += std::max(0.0, s2 / n - m * m);
  }
  return total / static_cast<double>(pixels);
}

}  // namespace testing_support
