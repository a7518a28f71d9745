#pragma once

#include <cstddef>

namespace epilab {

/// Uniform grid lo = x_0 < x_1 < ... < x_{n-1} = hi.
class Grid1D {
 public:
  static constexpr std::size_t kMinPoints = 16;

  Grid1D(double lo, double hi, std::size_t n);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return (hi_ - lo_) / static_cast<double>(n_ - 1); }
  double point(std::size_t i) const noexcept { return lo_ + static_cast<double>(i) * spacing(); }

  /// Same spacing, widened by at least `margin` on both sides.
  Grid1D extended(double margin) const;

  /// Index offset of `other` inside this grid when both share spacing and
  /// nodes; returns -1 when the grids are not aligned.
  long aligned_offset(const Grid1D& other) const noexcept;

  bool operator==(const Grid1D& other) const noexcept {
    return lo_ == other.lo_ && hi_ == other.hi_ && n_ == other.n_;
  }

 private:
  double lo_;
  double hi_;
  std::size_t n_;
};

bool same_spacing(const Grid1D& a, const Grid1D& b, double rel_tol = 1e-12) noexcept;

}  // namespace epilab
