#include "turbfuse/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "turbfuse/error.hpp"
#include "turbfuse/parallel.hpp"

namespace turbfuse {

double sharpness(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  if (w < 3 || h < 3) throw Error("sharpness: frame smaller than 3x3");
  const Plane& p = frame.pixels();
  double total = 0.0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double gx = (p(x + 1, y - 1) + 2.0 * p(x + 1, y) + p(x + 1, y + 1)) -
                        (p(x - 1, y - 1) + 2.0 * p(x - 1, y) + p(x - 1, y + 1));
      const double gy = (p(x - 1, y + 1) + 2.0 * p(x, y + 1) + p(x + 1, y + 1)) -
                        (p(x - 1, y - 1) + 2.0 * p(x, y - 1) + p(x + 1, y - 1));
      total += std::sqrt(gx * gx + gy * gy);
    }
  }
  return total / (static_cast<double>(w - 2) * (h - 2));
}

SharpnessSeries sharpness_series(const FrameSequence& seq) {
  SharpnessSeries series;
  series.raw.resize(seq.size());
  parallel_for(seq.size(), [&](std::size_t i) { series.raw[i] = sharpness(seq[i]); });
  const double peak = *std::max_element(series.raw.begin(), series.raw.end());
  series.normalized.resize(seq.size(), 0.0);
  if (peak > 0.0)
    for (std::size_t i = 0; i < seq.size(); ++i) series.normalized[i] = series.raw[i] / peak;
  series.frame_ids = seq.source_ids();
  return series;
}

std::vector<std::size_t> select_indices(std::span<const double> scores, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError("selection fraction must be in (0,1], got " + std::to_string(fraction));
  const std::size_t n = scores.size();
  const auto keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))), 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

FrameSequence select_frames(const FrameSequence& seq, double fraction) {
  std::vector<double> scores(seq.size());
  parallel_for(seq.size(), [&](std::size_t i) { scores[i] = sharpness(seq[i]); });
  const auto picked = select_indices(scores, fraction);
  std::vector<Frame> frames;
  std::vector<std::string> ids;
  for (std::size_t i : picked) {
    frames.push_back(seq[i]);
    ids.push_back(seq.source_ids()[i]);
  }
  return FrameSequence(std::move(frames), std::move(ids));
}

void export_series_csv(const SharpnessSeries& series, const std::filesystem::path& path) {
  if (series.raw.size() != series.normalized.size() ||
      series.raw.size() != series.frame_ids.size())
    throw Error("sharpness series columns have different lengths");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "frame_id,raw,normalized\n" << std::setprecision(17);
  for (std::size_t i = 0; i < series.raw.size(); ++i)
    out << series.frame_ids[i] << ',' << series.raw[i] << ',' << series.normalized[i] << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

double coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double m = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - m) * (v - m);
  var /= n;
  return m == 0.0 ? 0.0 : std::sqrt(var) / m;
}

}  // namespace turbfuse
