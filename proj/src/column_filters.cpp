#include "column_filters.hpp"

#include <numeric>

#include "turbfuse/error.hpp"

namespace turbfuse::detail {
namespace {

// Half-sample symmetric reflection into [0, n).
int reflect(int i, int n) noexcept {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m >= n ? period - 1 - m : m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// out(x, out_row) += sum_k f[k] * x(col, rows[j0 + L - 1 - k])   (valid convolution)
void accumulate_conv(const Plane& in, std::span<const int> rows, std::span<const double> f,
                     Plane& out, int out_row, int j0) {
  const int len = static_cast<int>(f.size());
  const auto dst = out.row(out_row);
  for (int k = 0; k < len; ++k) {
    const auto src = in.row(rows[j0 + len - 1 - k]);
    const double w = f[k];
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * src[c];
  }
}

std::vector<int> decimate(std::span<const int> rows, int first, int step, int last_exclusive) {
  std::vector<int> out;
  for (int t = first; t < last_exclusive; t += step) out.push_back(rows[t]);
  return out;
}

std::vector<double> phase(std::span<const double> h, int offset) {
  std::vector<double> out;
  for (std::size_t i = offset; i < h.size(); i += 2) out.push_back(h[i]);
  return out;
}

}  // namespace

Plane add(const Plane& a, const Plane& b) {
  if (!a.same_shape(b)) throw Error("internal: plane shape mismatch in add");
  Plane out = a;
  auto o = out.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
  return out;
}

Plane colfilter(const Plane& x, std::span<const double> h) {
  const int r = x.height();
  const int m = static_cast<int>(h.size());
  const int m2 = m / 2;
  std::vector<int> xe(r + 2 * m2);
  for (int i = 0; i < static_cast<int>(xe.size()); ++i) xe[i] = reflect(i - m2, r);
  const int out_rows = static_cast<int>(xe.size()) - m + 1;
  Plane y(x.width(), out_rows);
  for (int i = 0; i < out_rows; ++i) accumulate_conv(x, xe, h, y, i, i);
  return y;
}

Plane coldfilt(const Plane& x, std::span<const double> ha, std::span<const double> hb) {
  const int r = x.height();
  if (r % 4 != 0) throw Error("internal: coldfilt needs a row count divisible by 4");
  if (ha.size() != hb.size() || ha.size() % 2 != 0)
    throw Error("internal: coldfilt needs equal even-length filters");
  const int m = static_cast<int>(ha.size());

  std::vector<int> xe(r + 2 * m);
  for (int i = 0; i < static_cast<int>(xe.size()); ++i) xe[i] = reflect(i - m, r);

  const auto hao = phase(ha, 0), hae = phase(ha, 1);
  const auto hbo = phase(hb, 0), hbe = phase(hb, 1);
  // Sample streams t, t-1, t-2, t-3 for t = 5, 9, 13, ... < r + 2m - 2.
  const int limit = r + 2 * m - 2;
  const auto s0 = decimate(xe, 5, 4, limit);
  std::vector<int> s1, s2, s3;
  for (int t = 5; t < limit; t += 4) {
    s1.push_back(xe[t - 1]);
    s2.push_back(xe[t - 2]);
    s3.push_back(xe[t - 3]);
  }

  const int r2 = r / 2;
  const bool a_first = dot(ha, hb) > 0.0;
  Plane y(x.width(), r2);
  for (int i = 0; i < r2 / 2; ++i) {
    const int row_a = a_first ? 2 * i : 2 * i + 1;
    const int row_b = a_first ? 2 * i + 1 : 2 * i;
    accumulate_conv(x, s1, hao, y, row_a, i);
    accumulate_conv(x, s3, hae, y, row_a, i);
    accumulate_conv(x, s0, hbo, y, row_b, i);
    accumulate_conv(x, s2, hbe, y, row_b, i);
  }
  return y;
}

Plane colifilt(const Plane& x, std::span<const double> ha, std::span<const double> hb) {
  const int r = x.height();
  if (r % 2 != 0) throw Error("internal: colifilt needs an even row count");
  if (ha.size() != hb.size() || ha.size() % 2 != 0)
    throw Error("internal: colifilt needs equal even-length filters");
  const int m = static_cast<int>(ha.size());
  const int m2 = m / 2;

  std::vector<int> xe(r + 2 * m2);
  for (int i = 0; i < static_cast<int>(xe.size()); ++i) xe[i] = reflect(i - m2, r);

  const auto hao = phase(ha, 0), hae = phase(ha, 1);
  const auto hbo = phase(hb, 0), hbe = phase(hb, 1);
  const bool a_first = dot(ha, hb) > 0.0;

  Plane y(x.width(), 2 * r);
  const int quads = r / 2;
  if (m2 % 2 == 0) {
    std::vector<int> ta, tb, ta2, tb2;
    for (int t = 3; t < r + m; t += 2) {
      const int a = a_first ? t : t - 1;
      const int b = a_first ? t - 1 : t;
      ta.push_back(xe[a]);
      tb.push_back(xe[b]);
      ta2.push_back(xe[a - 2]);
      tb2.push_back(xe[b - 2]);
    }
    for (int i = 0; i < quads; ++i) {
      accumulate_conv(x, tb2, hae, y, 4 * i, i);
      accumulate_conv(x, ta2, hbe, y, 4 * i + 1, i);
      accumulate_conv(x, tb, hao, y, 4 * i + 2, i);
      accumulate_conv(x, ta, hbo, y, 4 * i + 3, i);
    }
  } else {
    std::vector<int> ta, tb;
    for (int t = 2; t < r + m - 1; t += 2) {
      ta.push_back(xe[a_first ? t : t - 1]);
      tb.push_back(xe[a_first ? t - 1 : t]);
    }
    for (int i = 0; i < quads; ++i) {
      accumulate_conv(x, tb, hao, y, 4 * i, i);
      accumulate_conv(x, ta, hbo, y, 4 * i + 1, i);
      accumulate_conv(x, tb, hae, y, 4 * i + 2, i);
      accumulate_conv(x, ta, hbe, y, 4 * i + 3, i);
    }
  }
  return y;
}

}  // namespace turbfuse::detail
