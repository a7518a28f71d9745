#include "epilab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epilab/error.hpp"

namespace epilab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::grid_too_small: return "grid-too-small";
    case ErrorKind::non_finite_input: return "non-finite-input";
    case ErrorKind::excessive_mask_loss: return "excessive-mask-loss";
    case ErrorKind::kernel_underresolved: return "kernel-underresolved";
    case ErrorKind::step_size_insufficient: return "step-size-insufficient";
    case ErrorKind::config_invalid: return "config-invalid";
  }
  return "unknown";
}

Grid1D::Grid1D(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi), n_(n) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(ErrorKind::invalid_parameters, "grid requires finite lo < hi");
  }
  if (n < kMinPoints) {
    throw Error(ErrorKind::invalid_parameters,
                "grid requires at least " + std::to_string(kMinPoints) + " points");
  }
}

Grid1D Grid1D::extended(double margin) const {
  if (!(margin > 0.0)) return *this;
  const double h = spacing();
  const auto k = static_cast<std::size_t>(std::ceil(margin / h - 1e-9));
  const double kh = static_cast<double>(k) * h;
  return Grid1D(lo_ - kh, hi_ + kh, n_ + 2 * k);
}

long Grid1D::aligned_offset(const Grid1D& other) const noexcept {
  if (!same_spacing(*this, other)) return -1;
  const double h = spacing();
  const double shift = (other.lo_ - lo_) / h;
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) > 1e-6) return -1;
  if (rounded < 0.0) return -1;
  const auto off = static_cast<std::size_t>(rounded);
  if (off + other.n_ > n_) return -1;
  return static_cast<long>(off);
}

bool same_spacing(const Grid1D& a, const Grid1D& b, double rel_tol) noexcept {
  const double ha = a.spacing();
  const double hb = b.spacing();
  return std::abs(ha - hb) <= rel_tol * std::max(ha, hb);
}

}  // namespace epilab
