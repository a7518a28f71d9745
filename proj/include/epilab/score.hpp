#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "epilab/check_result.hpp"
#include "epilab/density.hpp"

namespace epilab {

/// Scores are masked where p < kFloorRatio · max p.
inline constexpr double kFloorRatio = 1e-12;
/// fisher_report refuses densities whose masked region holds more mass.
inline constexpr double kMaxMaskMass = 1e-4;

using Mask2D = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Score1D {
  std::vector<double> rho;
  std::vector<std::uint8_t> mask;  // 1 where p is below the floor
};

struct ScoreField {
  Eigen::MatrixXd rho1;  // ∂p/∂x / p
  Eigen::MatrixXd rho2;  // ∂p/∂y / p
  Score1D rhoX;
  Score1D rhoY;
  Mask2D mask;
};

/// d/dx log p by centered differences of log p: eighth order in the interior,
/// dropping order near the box edges and the masked region, one-sided second
/// order at the two end points.
std::vector<double> log_derivative(std::span<const double> p, double h, double floor);

Score1D score_1d(const Density1D& d);
ScoreField score_2d(const Density2D& joint);

/// Everything the Fisher and entropy reports need from one joint density.
struct JointAnalysis {
  Density2D joint;
  Density1D px;
  Density1D py;
  Density1D pw;
  ScoreField scores;
  Score1D rhoW;
};

JointAnalysis analyze(const Density2D& joint);

struct PsiResult {
  double value = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct FisherReport {
  double jX = 0.0;
  double jY = 0.0;
  double jXX = 0.0;
  double jYY = 0.0;
  double jXY = 0.0;
  double crossXY = 0.0;
  double jW = 0.0;  // J(X + Y)
  double maskMass = 0.0;
  PsiResult psi;
  double massDeviation = 0.0;
  Moments moments;
};

FisherReport fisher_report(const JointAnalysis& a);
FisherReport fisher_report(const Density2D& joint);

/// E M_{a,b}(X,Y)^2 with M_{a,b} = a(ρ1 - ρ_X) + b(ρ2 - ρ_Y).
double m_statistic_moment(const JointAnalysis& a, double ca, double cb);
double m_statistic_moment(const Density2D& joint, double ca, double cb);

/// E M_{1,-1}^2 against J_XX - 2J_XY + J_YY - J(X) - J(Y) - 2 E ρ_X ρ_Y.
CheckResult m_identity_check(const JointAnalysis& a);
CheckResult m_identity_check(const Density2D& joint);

/// Box-sup of |p / (p_X p_Y) - 1| over unmasked grid points.
PsiResult psi_mixing(const JointAnalysis& a);
PsiResult psi_mixing(const Density2D& joint);

/// ρ_W from differentiating p_W.
Score1D score_of_sum_direct(const JointAnalysis& a);

/// E[ρ1 | W = w] and E[ρ2 | W = w] on the W grid.
struct ConditionalSumScores {
  std::vector<double> via_first;
  std::vector<double> via_second;
};
ConditionalSumScores score_of_sum_conditional(const JointAnalysis& a);

/// Weighted L2 (weight p_W) distance between the direct and conditional
/// routes to ρ_W; both conditional forms are compared.
CheckResult check_score_of_sum(const JointAnalysis& a, double tolerance = 1e-3);

}  // namespace epilab
