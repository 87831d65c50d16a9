#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace turbfuse {

/// Dense row-major 2-D array of doubles with no range restriction.
///
/// Used for everything that is "image shaped" but is not a displayable
/// frame: flow components, wavelet subbands, activity maps, intermediate
/// filter results.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);
  Plane(int width, int height, std::vector<double> values);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

  double& operator()(int x, int y) noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  double operator()(int x, int y) const noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }

  /// Sample with replicate-border addressing.
  [[nodiscard]] double clamped(int x, int y) const noexcept;

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> row(int y) noexcept {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }
  [[nodiscard]] std::span<const double> row(int y) const noexcept {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(y) * width_,
                                                    width_);
  }

  [[nodiscard]] bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

[[nodiscard]] Plane transpose(const Plane& p);
[[nodiscard]] double sum(const Plane& p);
[[nodiscard]] double mean(const Plane& p);
[[nodiscard]] double max_abs_difference(const Plane& a, const Plane& b);

}  // namespace turbfuse
