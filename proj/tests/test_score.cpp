#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "epilab/error.hpp"
#include "epilab/family.hpp"
#include "epilab/gaussian_oracle.hpp"
#include "epilab/score.hpp"

using namespace epilab;

namespace {

Density2D gaussian(double r, std::size_t n = 512) {
  return build_density({"gaussian", {{"r", r}}, std::nullopt, n, {}});
}

void expect_fisher_near(const FisherReport& got, const FisherReport& want, double tol) {
  EXPECT_NEAR(got.jX, want.jX, tol);
  EXPECT_NEAR(got.jY, want.jY, tol);
  EXPECT_NEAR(got.jXX, want.jXX, tol);
  EXPECT_NEAR(got.jYY, want.jYY, tol);
  EXPECT_NEAR(got.jXY, want.jXY, tol);
  EXPECT_NEAR(got.crossXY, want.crossXY, tol);
  EXPECT_NEAR(got.jW, want.jW, tol);
}

}  // namespace

TEST(Score, LogDerivativeOfGaussianIsLinear) {
  const Grid1D g(-8.0, 8.0, 401);
  std::vector<double> p(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) p[i] = std::exp(-0.5 * g.point(i) * g.point(i) / 2.0);
  const auto rho = log_derivative(p, g.spacing(), 1e-12);
  for (std::size_t i = 0; i < g.size(); i += 13) EXPECT_NEAR(rho[i], -g.point(i) / 2.0, 1e-9);
}

TEST(Score, LogDerivativeHighOrderOnSmoothNonPolynomial) {
  // log p = sin(x): centered eighth-order stencil error ~ h^8.
  const Grid1D g(-3.0, 3.0, 241);
  std::vector<double> p(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) p[i] = std::exp(std::sin(g.point(i)));
  const auto rho = log_derivative(p, g.spacing(), 1e-12);
  for (std::size_t i = 8; i + 8 < g.size(); i += 7) EXPECT_NEAR(rho[i], std::cos(g.point(i)), 1e-11);
  EXPECT_NEAR(rho.front(), std::cos(g.lo()), 1e-2);
}

TEST(Score, FisherMatchesOracleOnAnalyticPath) {
  for (double r : {-0.6, 0.0, 0.45}) {
    SCOPED_TRACE(r);
    expect_fisher_near(fisher_report(gaussian(r)), oracle_fisher(unit_gaussian(r)), 1e-6);
  }
}

TEST(Score, FisherMatchesOracleOnTabulatedPath) {
  // Finite differences of log p instead of exact gradients.
  const double r = 0.5;
  expect_fisher_near(fisher_report(gaussian(r).as_tabulated()), oracle_fisher(unit_gaussian(r)), 1e-5);
}

TEST(Score, UnequalVariancesAndMeans) {
  const GaussianSpec s{1.0, -2.0, 2.0, 0.5, -0.4};
  const auto d = build_density({"gaussian", {{"r", s.cov / std::sqrt(s.vX * s.vY)}, {"vx", s.vX}, {"vy", s.vY},
                                              {"mx", s.meanX}, {"my", s.meanY}},
                                std::nullopt, 512, {}});
  expect_fisher_near(fisher_report(d), oracle_fisher(s), 1e-5);
}

TEST(Score, PsiVanishesForProducts) {
  const auto d = gaussian(0.0);
  EXPECT_LT(psi_mixing(d).value, 1e-9);
}

TEST(Score, PsiNearOriginMatchesOracle) {
  // The box-sup is attained in the tails; at the origin the ratio is exact.
  const double r = 0.4;
  const auto d = gaussian(r);
  const auto psi = psi_mixing(d);
  EXPECT_GE(psi.value, oracle_dependence_ratio(unit_gaussian(r), 0.0, 0.0) - 1.0);
  EXPECT_GT(std::abs(psi.x), 1.0);
}

TEST(Score, MStatisticMatchesOracle) {
  for (double r : {-0.5, 0.3}) {
    const auto d = gaussian(r);
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{1.0, -1.0}, std::pair{2.0, 0.5}}) {
      EXPECT_NEAR(m_statistic_moment(d, a, b), oracle_m_moment(unit_gaussian(r), a, b), 1e-5);
    }
  }
}

TEST(Score, MIdentityHoldsOnNonGaussianFamilies) {
  for (const FamilySpec& spec : {FamilySpec{"quartic", {{"b", 0.5}}, std::nullopt, 512, {}},
                                 FamilySpec{"mixture", {{"r", 0.3}}, std::nullopt, 512, {}}}) {
    SCOPED_TRACE(spec.name);
    const auto c = m_identity_check(build_density(spec));
    EXPECT_EQ(c.status, CheckStatus::passed);
    EXPECT_LE(std::abs(c.slack), 1e-4);
  }
}

TEST(Score, SumScoreTwoRoutesAgree) {
  const auto a = analyze(gaussian(0.5));
  const auto direct = score_of_sum_direct(a);
  const auto cond = score_of_sum_conditional(a);
  // W ~ N(0, 3): ρ_W(w) = -w/3.
  const auto& gw = a.pw.grid();
  for (std::size_t k = gw.size() / 4; k < 3 * gw.size() / 4; k += 31) {
    const double w = gw.point(k);
    EXPECT_NEAR(direct.rho[k], -w / 3.0, 1e-7);
    EXPECT_NEAR(cond.via_first[k], -w / 3.0, 1e-7);
    EXPECT_NEAR(cond.via_second[k], -w / 3.0, 1e-7);
  }
  EXPECT_EQ(check_score_of_sum(a).status, CheckStatus::passed);
}

TEST(Score, MaskMassIsNegligibleOnDefaultBox) {
  const auto f = fisher_report(gaussian(0.8));
  EXPECT_LT(f.maskMass, 1e-10);
  EXPECT_NEAR(f.massDeviation, 0.0, 1e-12);
}
