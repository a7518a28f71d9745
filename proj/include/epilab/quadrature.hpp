#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "epilab/grid.hpp"

namespace epilab {

/// Trapezoid weights for `grid`: h in the interior, h/2 at both ends.
std::vector<double> trapezoid_weights(const Grid1D& grid);

/// Trapezoid rule over the whole grid. Throws non-finite-input on NaN/inf.
double quadrature_1d(std::span<const double> f, const Grid1D& grid);

/// Tensor-product trapezoid rule; rows index gx, columns index gy.
double quadrature_2d(const Eigen::MatrixXd& f, const Grid1D& gx, const Grid1D& gy);

}  // namespace epilab
