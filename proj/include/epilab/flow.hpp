#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "epilab/check_result.hpp"
#include "epilab/density.hpp"
#include "epilab/entropy.hpp"
#include "epilab/score.hpp"

namespace epilab {

/// Covariance C of the added noise Z_{Ct} ~ N(0, C t).
struct NoiseCovariance {
  double c11 = 0.0;
  double c12 = 0.0;
  double c22 = 0.0;

  static NoiseCovariance identity() { return {1.0, 0.0, 1.0}; }
  static NoiseCovariance diagonal(double a, double b) { return {a, 0.0, b}; }

  bool is_zero() const noexcept { return c11 == 0.0 && c12 == 0.0 && c22 == 0.0; }
  bool is_diagonal() const noexcept { return c12 == 0.0; }
  /// Smallest strictly positive eigenvalue; 0 for the zero matrix.
  double min_positive_eigenvalue() const;
  /// Throws invalid-parameters unless C is positive semidefinite.
  void validate() const;
};

struct SmoothOptions {
  /// Widen the box by 8 noise standard deviations per axis.
  bool extend_box = true;
};

/// Density of (X, Y) + Z with Z ~ N(0, C·dt). Gaussian mixtures stay in
/// closed form; other densities are convolved numerically (separable
/// quadrature when c12 = 0, FFT otherwise). Throws kernel-underresolved when
/// a numerical kernel is narrower than two grid spacings.
Density2D gaussian_smooth(const Density2D& joint, const NoiseCovariance& cov, double dt, SmoothOptions options = {});

/// Independent noise N(0, vx) ⊗ N(0, vy) evaluated directly on the target
/// grids by trapezoid quadrature over the source grid. A zero variance
/// requires the target axis to contain the source axis node for node.
Density2D smooth_independent_onto(const Density2D& source, double vx, double vy, const Grid1D& gx, const Grid1D& gy);

/// max(1e-3, (2h)^2 / λ_min): the smallest finite-difference step whose noise
/// kernel is still resolved.
double default_fd_step(const Density2D& joint, const NoiseCovariance& cov);

/// d/dt H(X + Z_{Ct}) by finite differences against ½ Σ C_ij J_ij at time t.
CheckResult check_de_bruijn(const Density2D& joint, const NoiseCovariance& cov, double t,
                            std::optional<double> dt_fd = std::nullopt);

/// d/dt (2H(X_t,Y_t) - 2H(W_t)) at t = 0 against (a²C11 - 2abC12 + b²C22)/(a+b)
/// with a = J_XX - J_XY, b = J_YY - J_XY.
CheckResult entropy_gap_derivative(const Density2D& joint, const NoiseCovariance& cov,
                                   std::optional<double> dt_fd = std::nullopt);

struct FlowParams {
  double t_max = 0.0;
  int steps = 32;
  std::size_t grid_n = 512;
  bool richardson = true;
  /// Fisher reports (and ψ) at every step; entropies are always recorded.
  bool fisher = true;
};

struct FlowRecord {
  double t = 0.0;
  double f = 0.0;
  double g = 0.0;
  double s = 0.0;
  EntropyReport entropy;
  std::optional<FisherReport> fisher;
  Moments moments;
};

/// Trajectory of the coupled flow f' = 2^{2H(X_t|Y_t)}, g' = 2^{2H(Y_t|X_t)}.
struct STrajectory {
  std::vector<FlowRecord> records;
  Grid1D gx;
  Grid1D gy;
  FlowParams params;
  /// Final s from the run with twice as many steps (NaN when not run).
  double richardson_s;
  double richardson_diff;
};

inline constexpr double kRichardsonTolerance = 1e-3;

/// Smallest t_max for which `steps` Euler steps are guaranteed to add noise
/// of at least `factor` times each initial variance.
double noise_horizon_t_max(const Density2D& initial, int steps, double factor = 100.0);

STrajectory run_cepi_flow(const Density2D& initial, const FlowParams& params);

std::vector<std::pair<double, double>> condition1_along_flow(const STrajectory& trajectory);
std::vector<std::pair<double, double>> condition1_along_flow(const Density2D& initial, const FlowParams& params);

// Verdicts over a recorded trajectory.
CheckResult check_s_monotone(const STrajectory& trajectory, double slack = 1e-4);
CheckResult check_s_horizon(const STrajectory& trajectory, double factor = 100.0, double tolerance = 0.02);
CheckResult check_condition1_flow(const STrajectory& trajectory);
CheckResult check_psi_flow(const STrajectory& trajectory, double slack = 1e-6);
/// J(X_t) ≤ 1/(1/J(X) + f(t)) and the Y analogue, 1e-4 relative slack.
CheckResult check_fisher_flow_bound(const STrajectory& trajectory);
/// Cov(X_t, Y_t) constant and Var(X_t) = Var(X) + f(t), 1e-4 relative.
CheckResult check_moment_accounting(const STrajectory& trajectory);

}  // namespace epilab
