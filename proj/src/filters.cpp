#include "turbfuse/filters.hpp"

#include <algorithm>
#include <cmath>

#include "turbfuse/error.hpp"

namespace turbfuse {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    total += k[i + radius];
  }
  for (double& w : k) w /= total;
  return k;
}

Plane separable_filter(const Plane& in, std::span<const double> kx, std::span<const double> ky) {
  if (kx.size() % 2 == 0 || ky.size() % 2 == 0) throw Error("filter kernels must have odd length");
  const int w = in.width();
  const int h = in.height();
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);

  Plane tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -rx; i <= rx; ++i) acc += kx[i + rx] * in(std::clamp(x + i, 0, w - 1), y);
      tmp(x, y) = acc;
    }
  }
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -ry; i <= ry; ++i) acc += ky[i + ry] * tmp(x, std::clamp(y + i, 0, h - 1));
      out(x, y) = acc;
    }
  }
  return out;
}

Plane gaussian_blur(const Plane& in, double sigma) {
  if (!(sigma > 0.0)) return in;
  const auto k = gaussian_kernel(sigma);
  return separable_filter(in, k, k);
}

double sample_bilinear(const Plane& in, double x, double y) noexcept {
  const int w = in.width();
  const int h = in.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  if (fx == 0.0 && fy == 0.0) return in(x0, y0);
  const double top = (1.0 - fx) * in(x0, y0) + fx * in(x1, y0);
  const double bottom = (1.0 - fx) * in(x0, y1) + fx * in(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

Plane resize_bilinear(const Plane& in, int width, int height) {
  if (width <= 0 || height <= 0) throw Error("resize target must be positive");
  if (width == in.width() && height == in.height()) return in;
  const double sx = static_cast<double>(in.width()) / width;
  const double sy = static_cast<double>(in.height()) / height;
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < width; ++x) out(x, y) = sample_bilinear(in, (x + 0.5) * sx - 0.5, src_y);
  }
  return out;
}

Plane gradient_x(const Plane& in) {
  Plane out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      out(x, y) = 0.5 * (in.clamped(x + 1, y) - in.clamped(x - 1, y));
  return out;
}

Plane gradient_y(const Plane& in) {
  Plane out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      out(x, y) = 0.5 * (in.clamped(x, y + 1) - in.clamped(x, y - 1));
  return out;
}

double total_variation(const Plane& in) {
  double tv = 0.0;
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      if (x + 1 < in.width()) tv += std::abs(in(x + 1, y) - in(x, y));
      if (y + 1 < in.height()) tv += std::abs(in(x, y + 1) - in(x, y));
    }
  }
  return tv;
}

}  // namespace turbfuse
