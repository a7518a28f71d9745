#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "epilab/analytic.hpp"
#include "epilab/grid.hpp"

namespace epilab {

enum class DensityKind { analytic_backed, tabulated };

/// Tolerated deviation of the normalized trapezoid mass from one.
inline constexpr double kMassTolerance = 1e-6;

/// Univariate density sampled on a uniform grid, renormalized at
/// construction. The pre-normalization mass is kept as a truncation
/// diagnostic.
class Density1D {
 public:
  static Density1D tabulated(Grid1D grid, std::vector<double> values);
  static Density1D from_mixture(const GaussianMixture1D& mixture, Grid1D grid);

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  DensityKind kind() const noexcept { return analytic_ ? DensityKind::analytic_backed : DensityKind::tabulated; }
  const std::optional<GaussianMixture1D>& analytic() const noexcept { return analytic_; }
  double raw_mass() const noexcept { return raw_mass_; }
  double max_value() const noexcept { return max_value_; }
  double mean() const;
  double variance() const;

 private:
  Density1D(Grid1D grid, std::vector<double> values, std::optional<GaussianMixture1D> analytic);

  Grid1D grid_;
  std::vector<double> values_;
  std::optional<GaussianMixture1D> analytic_;
  double raw_mass_ = 1.0;
  double max_value_ = 0.0;
};

/// Bivariate density on a product grid (rows index x, columns index y).
/// Analytic-backed densities keep their closed form so score evaluation can
/// use exact derivatives.
class Density2D {
 public:
  static Density2D tabulated(Grid1D gx, Grid1D gy, Eigen::MatrixXd values);
  static Density2D from_model(AnalyticModel model, Grid1D gx, Grid1D gy);

  const Grid1D& grid_x() const noexcept { return gx_; }
  const Grid1D& grid_y() const noexcept { return gy_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  DensityKind kind() const noexcept { return model_ ? DensityKind::analytic_backed : DensityKind::tabulated; }
  const std::optional<AnalyticModel>& model() const noexcept { return model_; }
  double raw_mass() const noexcept { return raw_mass_; }
  double max_value() const noexcept { return max_value_; }

  /// The bivariate normal behind a single-component Gaussian backing.
  std::optional<GaussianComponent2D> single_gaussian() const;
  /// Same values with the closed form dropped.
  Density2D as_tabulated() const;
  /// Re-evaluates an analytic-backed density on new grids.
  Density2D retabulated(Grid1D gx, Grid1D gy) const;
  /// Zero-pads onto aligned, larger grids of the same spacing.
  Density2D padded(Grid1D gx, Grid1D gy) const;

 private:
  Density2D(Grid1D gx, Grid1D gy, Eigen::MatrixXd values, std::optional<AnalyticModel> model);

  Grid1D gx_;
  Grid1D gy_;
  Eigen::MatrixXd values_;
  std::optional<AnalyticModel> model_;
  double raw_mass_ = 1.0;
  double max_value_ = 0.0;
};

enum class Axis { X, Y };

struct Moments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;
};

Density1D marginalize(const Density2D& joint, Axis axis);

/// Grid on which sum_density represents W = X + Y.
Grid1D sum_grid(const Density2D& joint);

/// ∫ g(x, w - x) dx for each w on sum_grid(joint). With equal spacings every
/// slice passes through grid nodes; otherwise g is interpolated linearly in y.
std::vector<double> slice_integrals(const Density2D& joint, const Eigen::MatrixXd& g);

/// Density of W = X + Y.
Density1D sum_density(const Density2D& joint);

/// Independent coupling p_X(x)·p_Y(y). Analytic marginals on grids of
/// different spacing are re-sampled onto a common spacing first.
Density2D product_density(const Density1D& dx, const Density1D& dy);

Moments moments(const Density2D& joint);

}  // namespace epilab
