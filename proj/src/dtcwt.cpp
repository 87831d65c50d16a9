#include "turbfuse/dtcwt.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "column_filters.hpp"
#include "turbfuse/error.hpp"

namespace turbfuse {

using detail::add;
using detail::coldfilt;
using detail::colfilter;
using detail::colifilt;

double ComplexPlane::magnitude(int x, int y) const noexcept {
  return std::hypot(real(x, y), imag(x, y));
}

double ComplexPlane::energy() const noexcept {
  double e = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i)
    e += real.values()[i] * real.values()[i] + imag.values()[i] * imag.values()[i];
  return e;
}

double DtcwtLevel::energy() const noexcept {
  double e = 0.0;
  for (const auto& s : subbands) e += s.energy();
  return e;
}

int orientation_degrees(Orientation o) noexcept { return 15 + 30 * static_cast<int>(o); }

namespace {

const double kInvSqrt2 = std::sqrt(0.5);

// Split a quad-interleaved real image into two complex subbands:
//   a b      p = (a + jb)/sqrt2,  q = (d - jc)/sqrt2
//   c d      first = p - q,       second = p + q
std::pair<ComplexPlane, ComplexPlane> quads_to_complex(const Plane& y) {
  const int w = y.width() / 2;
  const int h = y.height() / 2;
  ComplexPlane first(w, h), second(w, h);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const double a = y(2 * i, 2 * j);
      const double b = y(2 * i + 1, 2 * j);
      const double c = y(2 * i, 2 * j + 1);
      const double d = y(2 * i + 1, 2 * j + 1);
      const double pr = a * kInvSqrt2, pi = b * kInvSqrt2;
      const double qr = d * kInvSqrt2, qi = -c * kInvSqrt2;
      first.real(i, j) = pr - qr;
      first.imag(i, j) = pi - qi;
      second.real(i, j) = pr + qr;
      second.imag(i, j) = pi + qi;
    }
  }
  return {std::move(first), std::move(second)};
}

Plane complex_to_quads(const ComplexPlane& first, const ComplexPlane& second) {
  const int w = first.width();
  const int h = first.height();
  Plane x(2 * w, 2 * h);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const double pr = (first.real(i, j) + second.real(i, j)) * kInvSqrt2;
      const double pi = (first.imag(i, j) + second.imag(i, j)) * kInvSqrt2;
      const double qr = (first.real(i, j) - second.real(i, j)) * kInvSqrt2;
      const double qi = (first.imag(i, j) - second.imag(i, j)) * kInvSqrt2;
      x(2 * i, 2 * j) = pr;
      x(2 * i + 1, 2 * j) = pi;
      x(2 * i, 2 * j + 1) = qi;
      x(2 * i + 1, 2 * j + 1) = -qr;
    }
  }
  return x;
}

// Orientation pairs produced by one quad image.
constexpr std::array<std::pair<int, int>, 3> kPairs{{{0, 5}, {2, 3}, {1, 4}}};

void store_pairs(DtcwtLevel& level, const Plane& horizontal, const Plane& vertical,
                 const Plane& diagonal) {
  const Plane* sources[3] = {&horizontal, &vertical, &diagonal};
  for (int p = 0; p < 3; ++p) {
    auto [first, second] = quads_to_complex(*sources[p]);
    level.subbands[kPairs[p].first] = std::move(first);
    level.subbands[kPairs[p].second] = std::move(second);
  }
}

Plane pair_quads(const DtcwtLevel& level, int p) {
  return complex_to_quads(level.subbands[kPairs[p].first], level.subbands[kPairs[p].second]);
}

// Duplicate the last row (bottom) so the height is even.
Plane pad_rows_even(const Plane& in) {
  if (in.height() % 2 == 0) return in;
  Plane out(in.width(), in.height() + 1);
  for (int y = 0; y < out.height(); ++y) {
    const auto src = in.row(std::min(y, in.height() - 1));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

// Duplicate the first and last rows so the height becomes a multiple of 4.
Plane pad_rows_quad(const Plane& in) {
  if (in.height() % 4 == 0) return in;
  Plane out(in.width(), in.height() + 2);
  for (int y = 0; y < out.height(); ++y) {
    const auto src = in.row(std::clamp(y - 1, 0, in.height() - 1));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

Plane crop_rows(const Plane& in, int first, int count) {
  Plane out(in.width(), count);
  for (int y = 0; y < count; ++y) {
    const auto src = in.row(first + y);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

}  // namespace

int max_dtcwt_levels(int width, int height, int requested) noexcept {
  int levels = std::clamp(requested, 1, kMaxDtcwtLevels);
  while (levels > 1 && std::min(width, height) < (1 << levels)) --levels;
  return levels;
}

DtcwtPyramid dtcwt_forward(const Plane& image, int levels, const FilterBank& bank) {
  if (levels < 1 || levels > kMaxDtcwtLevels)
    throw Error("dtcwt: level count must be in [1," + std::to_string(kMaxDtcwtLevels) + "], got " +
                std::to_string(levels));
  if (std::min(image.width(), image.height()) < (1 << levels))
    throw Error("dtcwt: image " + std::to_string(image.width()) + "x" +
                std::to_string(image.height()) + " too small for " + std::to_string(levels) +
                " levels");

  DtcwtPyramid pyr;
  pyr.original_width = image.width();
  pyr.original_height = image.height();

  // Even dimensions by duplicating the last row / column.
  const Plane x = transpose(pad_rows_even(transpose(pad_rows_even(image))));

  // Level 1: undecimated odd-length filters. Each colfilter runs down
  // columns; the transposes alternate the filtering axis.
  Plane lo = transpose(colfilter(x, bank.level1_lo));
  Plane hi = transpose(colfilter(x, bank.level1_hi));
  Plane lolo = transpose(colfilter(lo, bank.level1_lo));
  {
    DtcwtLevel level;
    store_pairs(level, transpose(colfilter(hi, bank.level1_lo)),
                transpose(colfilter(lo, bank.level1_hi)), transpose(colfilter(hi, bank.level1_hi)));
    pyr.levels.push_back(std::move(level));
  }

  for (int l = 1; l < levels; ++l) {
    lolo = transpose(pad_rows_quad(transpose(pad_rows_quad(lolo))));
    lo = transpose(coldfilt(lolo, bank.qshift_b_lo, bank.qshift_a_lo));
    hi = transpose(coldfilt(lolo, bank.qshift_b_hi, bank.qshift_a_hi));
    lolo = transpose(coldfilt(lo, bank.qshift_b_lo, bank.qshift_a_lo));
    DtcwtLevel level;
    store_pairs(level, transpose(coldfilt(hi, bank.qshift_b_lo, bank.qshift_a_lo)),
                transpose(coldfilt(lo, bank.qshift_b_hi, bank.qshift_a_hi)),
                transpose(coldfilt(hi, bank.qshift_b_hi, bank.qshift_a_hi)));
    pyr.levels.push_back(std::move(level));
  }
  pyr.lowpass = std::move(lolo);
  return pyr;
}

DtcwtPyramid dtcwt_forward(const Frame& frame, int levels, const FilterBank& bank) {
  return dtcwt_forward(frame.pixels(), levels, bank);
}

void check_pyramid_structure(const DtcwtPyramid& pyr) {
  if (pyr.levels.empty()) throw Error("malformed pyramid: no levels");
  for (std::size_t l = 0; l < pyr.levels.size(); ++l) {
    const auto& level = pyr.levels[l];
    for (const auto& s : level.subbands) {
      if (s.width() != level.width() || s.height() != level.height() ||
          !s.real.same_shape(s.imag) || s.width() == 0 || s.height() == 0)
        throw Error("malformed pyramid: inconsistent subband sizes at level " +
                    std::to_string(l + 1));
    }
    if (l > 0) {
      const auto& finer = pyr.levels[l - 1];
      // Each coarser level halves the (possibly 2-padded) finer lowpass.
      const int dw = 2 * level.width() - finer.width();
      const int dh = 2 * level.height() - finer.height();
      if ((dw != 0 && dw != 1) || (dh != 0 && dh != 1))
        throw Error("malformed pyramid: level " + std::to_string(l + 1) +
                    " size does not match level " + std::to_string(l));
    }
  }
  const auto& coarsest = pyr.levels.back();
  if (pyr.lowpass.width() != 2 * coarsest.width() || pyr.lowpass.height() != 2 * coarsest.height())
    throw Error("malformed pyramid: lowpass size does not match the coarsest level");
  const auto& finest = pyr.levels.front();
  if (2 * finest.width() - pyr.original_width < 0 || 2 * finest.width() - pyr.original_width > 1 ||
      2 * finest.height() - pyr.original_height < 0 ||
      2 * finest.height() - pyr.original_height > 1)
    throw Error("malformed pyramid: original size does not match level 1");
}

bool same_structure(const DtcwtPyramid& a, const DtcwtPyramid& b) noexcept {
  if (a.levels.size() != b.levels.size() || a.original_width != b.original_width ||
      a.original_height != b.original_height || !a.lowpass.same_shape(b.lowpass))
    return false;
  for (std::size_t l = 0; l < a.levels.size(); ++l)
    if (a.levels[l].width() != b.levels[l].width() || a.levels[l].height() != b.levels[l].height())
      return false;
  return true;
}

Plane dtcwt_inverse_plane(const DtcwtPyramid& pyr, const FilterBank& bank) {
  check_pyramid_structure(pyr);
  Plane z = pyr.lowpass;

  for (std::size_t l = pyr.levels.size(); l >= 2; --l) {
    const auto& level = pyr.levels[l - 1];
    const Plane lh = pair_quads(level, 0);
    const Plane hl = pair_quads(level, 1);
    const Plane hh = pair_quads(level, 2);
    const Plane y1 = add(colifilt(z, bank.qshift_b_lo_syn, bank.qshift_a_lo_syn),
                         colifilt(lh, bank.qshift_b_hi_syn, bank.qshift_a_hi_syn));
    const Plane y2 = add(colifilt(hl, bank.qshift_b_lo_syn, bank.qshift_a_lo_syn),
                         colifilt(hh, bank.qshift_b_hi_syn, bank.qshift_a_hi_syn));
    z = transpose(add(colifilt(transpose(y1), bank.qshift_b_lo_syn, bank.qshift_a_lo_syn),
                      colifilt(transpose(y2), bank.qshift_b_hi_syn, bank.qshift_a_hi_syn)));

    // Undo the quad padding added on the way down.
    const auto& finer = pyr.levels[l - 2];
    const int want_h = 2 * finer.height();
    const int want_w = 2 * finer.width();
    if (z.height() != want_h) z = crop_rows(z, 1, z.height() - 2);
    if (z.width() != want_w) z = transpose(crop_rows(transpose(z), 1, z.width() - 2));
    if (z.height() != want_h || z.width() != want_w)
      throw Error("malformed pyramid: level " + std::to_string(l) + " cannot be synthesised");
  }

  const auto& level = pyr.levels.front();
  const Plane lh = pair_quads(level, 0);
  const Plane hl = pair_quads(level, 1);
  const Plane hh = pair_quads(level, 2);
  if (!lh.same_shape(z)) throw Error("malformed pyramid: level 1 does not match lowpass path");
  const Plane y1 = add(colfilter(z, bank.level1_lo_syn), colfilter(lh, bank.level1_hi_syn));
  const Plane y2 = add(colfilter(hl, bank.level1_lo_syn), colfilter(hh, bank.level1_hi_syn));
  z = transpose(add(colfilter(transpose(y1), bank.level1_lo_syn),
                    colfilter(transpose(y2), bank.level1_hi_syn)));

  if (z.width() == pyr.original_width && z.height() == pyr.original_height) return z;
  Plane out(pyr.original_width, pyr.original_height);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out(x, y) = z(x, y);
  return out;
}

Frame dtcwt_inverse(const DtcwtPyramid& pyr, const FilterBank& bank) {
  return Frame::unclamped(dtcwt_inverse_plane(pyr, bank));
}

void dump_pyramid(const DtcwtPyramid& pyr, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_plane = [&](const Plane& p, const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    for (double v : p.values()) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                             static_cast<char>((bits >> 16) & 0xff),
                             static_cast<char>((bits >> 24) & 0xff)};
      out.write(bytes, 4);
    }
  };

  nlohmann::json manifest;
  manifest["original_width"] = pyr.original_width;
  manifest["original_height"] = pyr.original_height;
  manifest["format"] = "float32le";
  auto& entries = manifest["subbands"] = nlohmann::json::array();
  for (std::size_t l = 0; l < pyr.levels.size(); ++l) {
    for (int o = 0; o < kOrientations; ++o) {
      const auto& s = pyr.levels[l].subbands[o];
      for (const auto& [part, plane] : {std::pair{"real", &s.real}, std::pair{"imag", &s.imag}}) {
        const std::string file = "level" + std::to_string(l + 1) + "_orient" +
                                 std::to_string(orientation_degrees(static_cast<Orientation>(o))) +
                                 "_" + part + ".f32";
        write_plane(*plane, file);
        entries.push_back({{"file", file},
                           {"level", l + 1},
                           {"orientation_deg", orientation_degrees(static_cast<Orientation>(o))},
                           {"part", part},
                           {"width", plane->width()},
                           {"height", plane->height()}});
      }
    }
  }
  write_plane(pyr.lowpass, "lowpass.f32");
  manifest["lowpass"] = {
      {"file", "lowpass.f32"}, {"width", pyr.lowpass.width()}, {"height", pyr.lowpass.height()}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace turbfuse
