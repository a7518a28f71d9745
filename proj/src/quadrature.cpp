#include "epilab/quadrature.hpp"

#include <cmath>

#include "epilab/error.hpp"

namespace epilab {

std::vector<double> trapezoid_weights(const Grid1D& grid) {
  std::vector<double> w(grid.size(), grid.spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double quadrature_1d(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != grid.size()) {
    throw Error(ErrorKind::invalid_parameters, "function size does not match grid");
  }
  const auto w = trapezoid_weights(grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw Error(ErrorKind::non_finite_input, "integrand is not finite at index " + std::to_string(i));
    }
    sum += w[i] * f[i];
  }
  return sum;
}

double quadrature_2d(const Eigen::MatrixXd& f, const Grid1D& gx, const Grid1D& gy) {
  if (static_cast<std::size_t>(f.rows()) != gx.size() || static_cast<std::size_t>(f.cols()) != gy.size()) {
    throw Error(ErrorKind::invalid_parameters, "function shape does not match grid");
  }
  if (!f.allFinite()) {
    throw Error(ErrorKind::non_finite_input, "2-D integrand is not finite");
  }
  const auto wx = trapezoid_weights(gx);
  const auto wy = trapezoid_weights(gy);
  // Column-major storage: sum each column over x, then weight by y.
  double total = 0.0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) col += wx[i] * f(i, j);
    total += wy[j] * col;
  }
  return total;
}

}  // namespace epilab
