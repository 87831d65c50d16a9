#include "turbfuse/fusion.hpp"

#include <cmath>
#include <deque>

#include "turbfuse/error.hpp"
#include "turbfuse/image_io.hpp"
#include "turbfuse/parallel.hpp"

namespace turbfuse {

FusionMode parse_fusion_mode(std::string_view text) {
  if (text == "pixel_max") return FusionMode::pixel_max;
  if (text == "region") return FusionMode::region;
  throw ConfigError("unknown fusion mode '" + std::string(text) + "' (pixel_max|region)");
}

std::string_view to_string(FusionMode mode) noexcept {
  return mode == FusionMode::pixel_max ? "pixel_max" : "region";
}

void FusionConfig::validate() const {
  if (levels < 1 || levels > kMaxDtcwtLevels)
    throw ConfigError("fusion levels must be in [1," + std::to_string(kMaxDtcwtLevels) + "]");
  if (!(activity_threshold_k > 0.0)) throw ConfigError("region threshold k must be > 0");
}

ActivityMap activity(const DtcwtPyramid& pyr) {
  ActivityMap map;
  for (const auto& level : pyr.levels) {
    Plane a(level.width(), level.height());
    for (const auto& s : level.subbands)
      for (std::size_t i = 0; i < a.size(); ++i)
        a.values()[i] += std::hypot(s.real.values()[i], s.imag.values()[i]);
    map.levels.push_back(std::move(a));
  }
  return map;
}

LabelImage segment_level(const Plane& mean_activity, double threshold_k, int* region_count) {
  const int w = mean_activity.width();
  const int h = mean_activity.height();
  LabelImage out{w, h, std::vector<int>(mean_activity.size(), 0)};

  const double n = static_cast<double>(mean_activity.size());
  const double m = mean(mean_activity);
  double var = 0.0;
  for (double v : mean_activity.values()) var += (v - m) * (v - m);
  const double threshold = m + threshold_k * std::sqrt(n > 0 ? var / n : 0.0);

  auto feature = [&](int x, int y) { return mean_activity(x, y) > threshold; };
  int next_label = 0;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!feature(x, y) || out.labels[y * w + x] != 0) continue;
      const int label = ++next_label;
      out.labels[y * w + x] = label;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            int& slot = out.labels[ny * w + nx];
            if (slot != 0 || !feature(nx, ny)) continue;
            slot = label;
            queue.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  if (region_count) *region_count = next_label;
  return out;
}

RegionMap segment(const std::vector<Plane>& mean_activity, double threshold_k) {
  RegionMap map;
  for (const auto& level : mean_activity) {
    int count = 0;
    map.levels.push_back(segment_level(level, threshold_k, &count));
    map.region_counts.push_back(count);
  }
  return map;
}

namespace {

void copy_coefficient(DtcwtLevel& dst, const DtcwtLevel& src, int orientation, std::size_t i) {
  dst.subbands[orientation].real.values()[i] = src.subbands[orientation].real.values()[i];
  dst.subbands[orientation].imag.values()[i] = src.subbands[orientation].imag.values()[i];
}

double squared_magnitude(const ComplexPlane& s, std::size_t i) {
  const double re = s.real.values()[i];
  const double im = s.imag.values()[i];
  return re * re + im * im;
}

// Coefficient with the largest magnitude per orientation; ties to the lowest index.
void pixel_max_at(DtcwtLevel& dst, const std::vector<DtcwtPyramid>& pyrs, std::size_t level,
                  std::size_t i) {
  for (int o = 0; o < kOrientations; ++o) {
    std::size_t best = 0;
    double best_mag = squared_magnitude(pyrs[0].levels[level].subbands[o], i);
    for (std::size_t f = 1; f < pyrs.size(); ++f) {
      const double mag = squared_magnitude(pyrs[f].levels[level].subbands[o], i);
      if (mag > best_mag) {
        best_mag = mag;
        best = f;
      }
    }
    copy_coefficient(dst, pyrs[best].levels[level], o, i);
  }
}

}  // namespace

DtcwtPyramid fuse_sequence(const std::vector<DtcwtPyramid>& pyrs, const FusionConfig& config,
                           RegionMap* regions_out) {
  config.validate();
  if (pyrs.empty()) throw Error("fuse_sequence: no pyramids");
  const DtcwtPyramid& first = pyrs.front();
  for (std::size_t f = 1; f < pyrs.size(); ++f) {
    const auto& p = pyrs[f];
    if (p.levels.size() != first.levels.size())
      throw Error("pyramid shape mismatch: level count " + std::to_string(p.levels.size()) +
                  " vs " + std::to_string(first.levels.size()));
    for (std::size_t l = 0; l < first.levels.size(); ++l)
      if (p.levels[l].width() != first.levels[l].width() ||
          p.levels[l].height() != first.levels[l].height())
        throw Error("pyramid shape mismatch at level " + std::to_string(l + 1));
    if (!p.lowpass.same_shape(first.lowpass) || p.original_width != first.original_width ||
        p.original_height != first.original_height)
      throw Error("pyramid shape mismatch at lowpass");
  }

  DtcwtPyramid fused;
  fused.original_width = first.original_width;
  fused.original_height = first.original_height;

  fused.lowpass = Plane(first.lowpass.width(), first.lowpass.height());
  for (const auto& p : pyrs)
    for (std::size_t i = 0; i < fused.lowpass.size(); ++i)
      fused.lowpass.values()[i] += p.lowpass.values()[i];
  for (double& v : fused.lowpass.values()) v /= static_cast<double>(pyrs.size());

  const std::size_t level_count = first.levels.size();
  fused.levels.resize(level_count);
  for (std::size_t l = 0; l < level_count; ++l)
    for (auto& s : fused.levels[l].subbands)
      s = ComplexPlane(first.levels[l].width(), first.levels[l].height());

  if (config.mode == FusionMode::pixel_max) {
    for (std::size_t l = 0; l < level_count; ++l) {
      const std::size_t n = static_cast<std::size_t>(first.levels[l].width()) *
                            first.levels[l].height();
      for (std::size_t i = 0; i < n; ++i) pixel_max_at(fused.levels[l], pyrs, l, i);
    }
    return fused;
  }

  std::vector<ActivityMap> activities(pyrs.size());
  parallel_for(pyrs.size(), [&](std::size_t f) { activities[f] = activity(pyrs[f]); });
  std::vector<Plane> mean_activity;
  for (std::size_t l = 0; l < level_count; ++l) {
    Plane m(first.levels[l].width(), first.levels[l].height());
    for (const auto& a : activities)
      for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] += a.levels[l].values()[i];
    for (double& v : m.values()) v /= static_cast<double>(pyrs.size());
    mean_activity.push_back(std::move(m));
  }
  RegionMap regions = segment(mean_activity, config.activity_threshold_k);

  for (std::size_t l = 0; l < level_count; ++l) {
    const LabelImage& labels = regions.levels[l];
    const int region_count = regions.region_counts[l];

    // Per-region winner: highest mean activity inside the region.
    std::vector<std::size_t> winner(region_count + 1, 0);
    if (region_count > 0) {
      std::vector<std::size_t> area(region_count + 1, 0);
      for (int label : labels.labels) ++area[label];
      std::vector<double> best(region_count + 1, -1.0);
      for (std::size_t f = 0; f < pyrs.size(); ++f) {
        std::vector<double> total(region_count + 1, 0.0);
        const auto act = activities[f].levels[l].values();
        for (std::size_t i = 0; i < labels.labels.size(); ++i) total[labels.labels[i]] += act[i];
        for (int r = 1; r <= region_count; ++r) {
          const double m = total[r] / static_cast<double>(area[r]);
          if (m > best[r]) {
            best[r] = m;
            winner[r] = f;
          }
        }
      }
    }

    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
      const int label = labels.labels[i];
      if (label == 0) {
        pixel_max_at(fused.levels[l], pyrs, l, i);
      } else {
        for (int o = 0; o < kOrientations; ++o)
          copy_coefficient(fused.levels[l], pyrs[winner[label]].levels[l], o, i);
      }
    }
  }
  if (regions_out) *regions_out = std::move(regions);
  return fused;
}

Frame fuse_frames(const FrameSequence& frames, const FusionConfig& config, const FilterBank& bank,
                  RegionMap* regions_out) {
  config.validate();
  const int levels = max_dtcwt_levels(frames.width(), frames.height(), config.levels);
  std::vector<DtcwtPyramid> pyrs(frames.size());
  parallel_for(frames.size(),
               [&](std::size_t i) { pyrs[i] = dtcwt_forward(frames[i], levels, bank); });
  return dtcwt_inverse(fuse_sequence(pyrs, config, regions_out), bank);
}

void dump_region_maps(const RegionMap& regions, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t l = 0; l < regions.levels.size(); ++l) {
    const auto& img = regions.levels[l];
    save_label_png(img.labels, img.width, img.height,
                   dir / ("regions_level" + std::to_string(l + 1) + ".png"));
  }
}

}  // namespace turbfuse
