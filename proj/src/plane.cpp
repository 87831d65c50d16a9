#include "turbfuse/plane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "turbfuse/error.hpp"

namespace turbfuse {

Plane::Plane(int width, int height, double fill) {
  if (width < 0 || height < 0) throw Error("plane dimensions must be non-negative");
  width_ = width;
  height_ = height;
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Plane::Plane(int width, int height, std::vector<double> values) {
  if (width < 0 || height < 0) throw Error("plane dimensions must be non-negative");
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw Error("plane data length " + std::to_string(values.size()) + " does not match " +
                std::to_string(width) + "x" + std::to_string(height));
  }
  width_ = width;
  height_ = height;
  values_ = std::move(values);
}

double Plane::clamped(int x, int y) const noexcept {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return (*this)(x, y);
}

Plane transpose(const Plane& p) {
  Plane out(p.height(), p.width());
  for (int y = 0; y < p.height(); ++y)
    for (int x = 0; x < p.width(); ++x) out(y, x) = p(x, y);
  return out;
}

double sum(const Plane& p) {
  const auto v = p.values();
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double mean(const Plane& p) { return p.empty() ? 0.0 : sum(p) / static_cast<double>(p.size()); }

double max_abs_difference(const Plane& a, const Plane& b) {
  if (!a.same_shape(b)) throw Error("max_abs_difference: dimension mismatch");
  double worst = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

}  // namespace turbfuse
