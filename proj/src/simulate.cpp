#include "turbfuse/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "turbfuse/error.hpp"
#include "turbfuse/image_io.hpp"
#include "turbfuse/filters.hpp"
#include "turbfuse/parallel.hpp"

namespace turbfuse {

void TurbulenceParams::validate() const {
  const double values[] = {warp_amplitude, warp_smoothness, blur_sigma_min, blur_sigma_max,
                           noise_sigma};
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError("turbulence parameters must be finite and non-negative");
  if (blur_sigma_min > blur_sigma_max)
    throw ConfigError("blur sigma range is inverted (min > max)");
  if (frames < 1) throw ConfigError("simulated sequence needs at least one frame");
}

SimulatedSequence degrade(const Frame& clean, const TurbulenceParams& params) {
  params.validate();
  if (std::min(clean.width(), clean.height()) < 32)
    throw Error("degrade: clean image must be at least 32x32");

  const int w = clean.width();
  const int h = clean.height();
  const auto n = static_cast<std::size_t>(params.frames);
  std::vector<Frame> frames(n);
  std::vector<FlowField> flows(n);

  parallel_for(n, [&](std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> unit(0.0, 1.0);

    // Draw on a margin-padded grid and crop, so the smoothed field is
    // stationary up to the image border.
    const int pad = static_cast<int>(gaussian_kernel(params.warp_smoothness).size() / 2);
    auto tilt = [&] {
      Plane big(w + 2 * pad, h + 2 * pad);
      for (double& x : big.values()) x = unit(rng);
      big = gaussian_blur(big, params.warp_smoothness);
      Plane out(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out(x, y) = big(x + pad, y + pad);
      return out;
    };
    Plane u = tilt();
    Plane v = tilt();
    FlowField flow(std::move(u), std::move(v));
    const double peak = max_magnitude(flow);
    const double gain = peak > 0.0 ? params.warp_amplitude / peak : 0.0;
    for (Plane* p : {&flow.u, &flow.v})
      for (double& x : p->values()) x *= gain;

    Plane img = warp_plane(clean.pixels(), flow.u, flow.v);

    std::uniform_real_distribution<double> blur(params.blur_sigma_min, params.blur_sigma_max);
    img = gaussian_blur(img, blur(rng));

    if (params.noise_sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, params.noise_sigma);
      for (double& x : img.values()) x += noise(rng);
    }
    for (double& x : img.values()) x = std::clamp(x, 0.0, 1.0);

    frames[index] = Frame(std::move(img));
    flows[index] = std::move(flow);
  });

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i)
    ids[i] = "seed" + std::to_string(params.seed) + "_frame" + std::to_string(i);
  return {FrameSequence(std::move(frames), std::move(ids)), std::move(flows)};
}

namespace {

constexpr double kInk = 0.1;
constexpr double kBackground = 0.9;

// Segment layout on a unit glyph box (x right, y down):
//   0 top, 1 upper-left, 2 upper-right, 3 middle, 4 lower-left,
//   5 lower-right, 6 bottom, 7 diagonal '\', 8 diagonal '/'.
struct Segment {
  double x0, y0, x1, y1;
};
constexpr Segment kSegments[] = {
    {0, 0, 1, 0},   {0, 0, 0, 0.5}, {1, 0, 1, 0.5}, {0, 0.5, 1, 0.5}, {0, 0.5, 0, 1},
    {1, 0.5, 1, 1}, {0, 1, 1, 1},   {0, 0, 1, 1},   {1, 0, 0, 1},
};

std::uint32_t glyph_pattern(unsigned char c) {
  // splitmix-style scramble of the byte; keep 3..7 strokes for a glyph look.
  std::uint64_t z = c + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  std::uint32_t bits = static_cast<std::uint32_t>(z) & 0x7f;  // orthogonal strokes
  if ((z >> 8) % 4 == 0) bits |= 1u << (7 + ((z >> 12) & 1));  // occasional diagonal
  const auto start = static_cast<std::uint32_t>((z >> 16) % 7);
  for (std::uint32_t k = 0; std::popcount(bits & 0x7fu) < 3; ++k) bits |= 1u << ((start + 3 * k) % 7);
  return bits;
}

double distance_to_segment(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

}  // namespace

Frame text_card(int width, int height, std::string_view text) {
  if (width < 64 || height < 32) throw Error("text_card: card must be at least 64x32");
  Plane card(width, height, kBackground);
  if (text.empty()) return Frame(std::move(card));

  const int margin = std::max(2, width / 16);
  const int usable_w = width - 2 * margin;
  const int usable_h = height - 2 * margin;
  const int n = static_cast<int>(text.size());

  // Grid with the largest glyphs; a glyph box is 1 wide by kAspect tall.
  constexpr double kAspect = 1.4;
  int per_line = 1;
  double best_scale = 0.0;
  for (int cols = 1; cols <= n; ++cols) {
    const int rows = (n + cols - 1) / cols;
    const double scale = std::min(static_cast<double>(usable_w) / cols,
                                  static_cast<double>(usable_h) / (rows * kAspect));
    if (scale > best_scale) {
      best_scale = scale;
      per_line = cols;
    }
  }
  const int lines = (n + per_line - 1) / per_line;
  const double cell_w = best_scale;
  const double cell_h = best_scale * kAspect;
  const double glyph_w = cell_w * 0.7;
  const double glyph_h = cell_h * 0.75;
  const double stroke = std::max(1.0, std::round(glyph_w * 0.2));
  const double left = margin + (usable_w - cell_w * per_line) / 2.0;
  const double top = margin + (usable_h - cell_h * lines) / 2.0;

  for (int i = 0; i < n; ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) continue;
    const std::uint32_t pattern = glyph_pattern(c);
    const double gx = left + (i % per_line) * cell_w + (cell_w - glyph_w) / 2.0;
    const double gy = top + (i / per_line) * cell_h + (cell_h - glyph_h) / 2.0;
    const int x_begin = std::max(0, static_cast<int>(std::floor(gx - stroke)));
    const int x_end = std::min(width, static_cast<int>(std::ceil(gx + glyph_w + stroke)));
    const int y_begin = std::max(0, static_cast<int>(std::floor(gy - stroke)));
    const int y_end = std::min(height, static_cast<int>(std::ceil(gy + glyph_h + stroke)));
    for (int s = 0; s < 9; ++s) {
      if (!(pattern & (1u << s))) continue;
      const Segment& seg = kSegments[s];
      const double ax = gx + seg.x0 * glyph_w, ay = gy + seg.y0 * glyph_h;
      const double bx = gx + seg.x1 * glyph_w, by = gy + seg.y1 * glyph_h;
      for (int y = y_begin; y < y_end; ++y)
        for (int x = x_begin; x < x_end; ++x)
          if (distance_to_segment(x + 0.5, y + 0.5, ax, ay, bx, by) <= stroke / 2.0)
            card(x, y) = kInk;
    }
  }
  return Frame(std::move(card));
}

void save_simulation(const SimulatedSequence& sim, const Frame& clean,
                     const TurbulenceParams& params, const std::filesystem::path& dir,
                     bool dump_flows, const std::string& text) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "truth");
  if (dump_flows) fs::create_directories(dir / "flows");

  auto numbered = [](std::size_t i, const char* ext) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu%s", i, ext);
    return std::string(name);
  };
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < sim.frames.size(); ++i) {
    const std::string name = numbered(i, ".png");
    save_frame(sim.frames[i], dir / name);
    files.push_back(name);
    if (dump_flows) write_flo2(sim.flows[i], dir / "flows" / numbered(i, ".flo2"));
  }
  save_frame(clean, dir / "truth" / "clean.png");

  nlohmann::json manifest{
      {"generator", "turbfuse simulate"},
      {"seed", params.seed},
      {"frames", params.frames},
      {"width", clean.width()},
      {"height", clean.height()},
      {"params",
       {{"warp_amplitude", params.warp_amplitude},
        {"warp_smoothness", params.warp_smoothness},
        {"blur_sigma_min", params.blur_sigma_min},
        {"blur_sigma_max", params.blur_sigma_max},
        {"noise_sigma", params.noise_sigma}}},
      {"clean_image", "truth/clean.png"},
      {"frame_files", files},
  };
  if (!text.empty()) manifest["text"] = text;
  if (dump_flows) manifest["flow_dir"] = "flows";
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace turbfuse
