#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "epilab/family.hpp"
#include "epilab/gaussian_oracle.hpp"
#include "epilab/inequalities.hpp"

using namespace epilab;

namespace {

constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

Density2D gaussian(double r) { return build_density({"gaussian", {{"r", r}}, std::nullopt, 512, {}}); }

Density1D normal1d(double var, std::size_t n = 512) {
  const double half = 8.0 * std::sqrt(var);
  return Density1D::from_mixture(GaussianMixture1D({{1.0, 0.0, var}}), Grid1D(-half, half, n));
}

Density1D bimodal(std::size_t n = 512) {
  return Density1D::from_mixture(GaussianMixture1D({{0.5, -2.0, 0.5}, {0.5, 2.0, 0.5}}), Grid1D(-10.0, 10.0, n));
}

}  // namespace

TEST(CheckResult, ToleranceRules) {
  const auto ineq = make_check("x", 1.0, 1.0 + 5e-5, inequality_tolerance(1.0, 1.0 + 5e-5), CheckMode::inequality);
  EXPECT_TRUE(ineq.pass);
  EXPECT_NEAR(ineq.slack, -5e-5, 1e-15);
  const auto eq = make_check("x", 1.0, 1.001, equality_tolerance(1.0, 1.001), CheckMode::equality_case);
  EXPECT_FALSE(eq.pass);
  EXPECT_EQ(eq.status, CheckStatus::failed);
  const auto sk = skipped_check("x", "why");
  EXPECT_EQ(sk.status, CheckStatus::skipped);
  EXPECT_TRUE(std::isnan(sk.slack));
}

TEST(Epi, StandardNormalsEquality) {
  const auto c = check_epi(gaussian(0.0));
  EXPECT_EQ(c.mode, CheckMode::equality_case);
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_NEAR(c.lhs / c.rhs, 1.0, 1e-3);
}

TEST(Epi, NormalAndBimodalStrict) {
  const auto c = check_epi(product_density(normal1d(1.0), bimodal()));
  EXPECT_EQ(c.mode, CheckMode::inequality);
  EXPECT_GT(c.slack, 1e-2 * c.rhs);
}

TEST(Epi, FailsUnderNegativeDependence) {
  const auto c = check_epi(gaussian(-0.5));
  EXPECT_NEAR(c.lhs, kTwoPiE * 1.0, 1e-4 * kTwoPiE);
  EXPECT_NEAR(c.rhs, kTwoPiE * 2.0, 1e-4 * kTwoPiE);
  EXPECT_EQ(c.status, CheckStatus::failed);
  EXPECT_TRUE(c.notes.contains("dependence"));
}

TEST(Stam, GaussianPairsEquality) {
  for (auto [vx, vy] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}}) {
    const auto c = check_stam(normal1d(vx), normal1d(vy));
    EXPECT_EQ(c.mode, CheckMode::equality_case);
    EXPECT_EQ(c.status, CheckStatus::passed);
    EXPECT_NEAR(c.lhs, vx + vy, 1e-4 * (vx + vy));
    EXPECT_NEAR(c.rhs, vx + vy, 1e-4 * (vx + vy));
  }
}

TEST(Stam, NormalAndBimodalStrict) {
  const auto c = check_stam(normal1d(1.0), bimodal());
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_GT(c.slack, 1e-2);
}

TEST(Prop4, GaussianHalfCorrelationBothSidesOne) {
  const auto c = check_prop4(gaussian(0.5));
  EXPECT_EQ(c.mode, CheckMode::equality_case);
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_NEAR(c.lhs, 1.0, 1e-4);
  EXPECT_NEAR(c.rhs, 1.0, 1e-4);
  EXPECT_EQ(c.notes.at("intermediate"), "passed");
}

TEST(Prop4, ProductReducesToStam) {
  const auto dx = normal1d(1.0);
  const auto dy = bimodal();
  const auto p4 = check_prop4(product_density(dx, dy));
  const auto st = check_stam(dx, dy);
  EXPECT_NEAR(p4.slack, st.slack, 1e-6);
}

TEST(Prop4, QuarticStrict) {
  const auto c = check_prop4(build_density({"quartic", {{"b", 0.5}}, std::nullopt, 512, {}}));
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_GT(c.slack, 1e-3);
}

TEST(Prop4, DegenerateDenominatorSkips) {
  // No density on a grid reaches J_XX = J_XY, so force it in the report.
  Evaluation e = evaluate(gaussian(0.5));
  e.fisher.jXY = e.fisher.jXX;
  const auto c = check_prop4(e);
  EXPECT_EQ(c.status, CheckStatus::skipped);
  EXPECT_EQ(c.notes.at("skipReason"), "degenerate-denominator");
}

TEST(Conditions, ProductIsBoundary) {
  const auto e = evaluate(gaussian(0.0));
  EXPECT_NEAR(check_condition1(e).lhs, 0.0, 1e-9);
  EXPECT_TRUE(check_condition1(e).pass);
  const auto t = check_condition_takano(e);
  EXPECT_NEAR(t.lhs, 0.0, 1e-9);
  EXPECT_NEAR(t.rhs, 0.0, 1e-9);
  EXPECT_TRUE(t.pass);
}

TEST(Conditions, GaussianHalfCorrelation) {
  const auto e = evaluate(gaussian(0.5));
  EXPECT_NEAR(check_condition1(e).lhs, 0.5, 1e-6);
  const auto t = check_condition_takano(e);
  EXPECT_NEAR(t.rhs, oracle_m_moment(unit_gaussian(0.5), 1.0, 1.0), 1e-6);
  EXPECT_NEAR(t.rhs, 1.0 / 3.0, 1e-6);
  EXPECT_TRUE(t.pass);
}

TEST(Conditions, NegativeCorrelationFailsConditionOne) {
  const auto c = check_condition1(gaussian(-0.3));
  EXPECT_NEAR(c.lhs, -0.3, 1e-6);
  EXPECT_EQ(c.status, CheckStatus::failed);
}

TEST(Cepi, GaussianHalfCorrelationSlack) {
  const auto c = check_cepi(gaussian(0.5));
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_NEAR(c.lhs, 3.0 * kTwoPiE, 1e-4 * kTwoPiE);
  EXPECT_NEAR(c.rhs, 1.5 * kTwoPiE, 1e-4 * kTwoPiE);
  EXPECT_NEAR(c.slack, 1.5 * kTwoPiE, 1e-3);
}

TEST(Cepi, ProductMatchesEpi) {
  const auto d = product_density(normal1d(1.0), bimodal());
  const auto e = evaluate(d);
  const auto a = check_cepi(e);
  const auto b = check_epi(e);
  EXPECT_NEAR(a.slack, b.slack, 1e-6);
  EXPECT_EQ(a.pass, b.pass);
}

TEST(Cepi, NegativeCorrelationFailsWithDiagnostics) {
  const auto c = check_cepi(gaussian(-0.5));
  EXPECT_EQ(c.status, CheckStatus::failed);
  EXPECT_NEAR(c.diagnostics.at("crossXY"), -0.5, 1e-6);
  EXPECT_EQ(c.notes.at("condition1"), "failed");
}

TEST(MixingThreshold, ProductSkipsWithZeroPsi) {
  const auto c = check_mixing_threshold(gaussian(0.0));
  EXPECT_EQ(c.status, CheckStatus::skipped);
  EXPECT_EQ(c.notes.at("skipReason"), "divide-by-zero-psi");
}

TEST(MixingThreshold, UnequalMarginalsSkip) {
  const auto d = build_density({"gaussian", {{"r", 0.3}, {"vx", 2.0}}, std::nullopt, 512, {}});
  EXPECT_EQ(check_mixing_threshold(d).status, CheckStatus::skipped);
}

TEST(MixingThreshold, GaussianRecordsVerdict) {
  const auto e = evaluate(gaussian(0.3));
  const auto c = check_mixing_threshold(e);
  ASSERT_NE(c.status, CheckStatus::skipped);
  EXPECT_NEAR(c.rhs, 1.0, 1e-6);  // standardized J(X)
  EXPECT_NEAR(c.lhs, std::sqrt(0.3 / e.fisher.psi.value + 1.0), 1e-6);
}

TEST(MixingThreshold, SymmetricQuarticRecordsVerdict) {
  const auto c = check_mixing_threshold(build_density({"quartic", {{"b", 0.3}}, std::nullopt, 512, {}}));
  EXPECT_NE(c.status, CheckStatus::skipped);
  EXPECT_NE(c.status, CheckStatus::failed);
  EXPECT_TRUE(c.diagnostics.contains("squaredRatioThreshold"));
}

namespace {

STrajectory short_flow(const Density2D& d) {
  FlowParams p;
  p.steps = 8;
  p.t_max = 0.08;
  p.grid_n = 256;
  p.richardson = false;
  return run_cepi_flow(d, p);
}

}  // namespace

TEST(MixingSufficient, ProductPassesTrivially) {
  const auto c = check_mixing_sufficient(short_flow(build_density({"gaussian", {}, std::nullopt, 256, {}})));
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_NEAR(c.lhs, 0.0, 1e-9);
}

TEST(MixingSufficient, GaussianPassImpliesConditionOne) {
  const auto c = check_mixing_sufficient(short_flow(build_density({"gaussian", {{"r", 0.3}}, std::nullopt, 256, {}})));
  EXPECT_EQ(c.status, CheckStatus::passed);
  EXPECT_EQ(c.notes.at("condition1"), "passed");
  EXPECT_GT(c.diagnostics.at("minCrossXY"), 0.0);
}

TEST(MixingSufficient, QuarticIsSufficientNotNecessary) {
  const auto c = check_mixing_sufficient(short_flow(build_density({"quartic", {{"b", 0.3}}, std::nullopt, 256, {}})));
  EXPECT_EQ(c.status, CheckStatus::inconclusive);
  EXPECT_EQ(c.notes.at("implication"), "sufficient-not-necessary");
}
