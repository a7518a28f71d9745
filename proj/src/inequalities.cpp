#include "epilab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epilab {
namespace {

constexpr double kDenominatorEps = 1e-8;

bool is_single_normal(const Density1D& d) {
  return d.analytic() && d.analytic()->components().size() == 1;
}

bool is_gaussian(const Density2D& joint) { return joint.single_gaussian().has_value(); }

bool is_gaussian_product(const Density2D& joint) {
  const auto g = joint.single_gaussian();
  return g && g->cov == 0.0;
}

CheckResult verdict(std::string name, double lhs, double rhs, bool equality) {
  return equality ? make_check(std::move(name), lhs, rhs, equality_tolerance(lhs, rhs), CheckMode::equality_case)
                  : make_check(std::move(name), lhs, rhs, inequality_tolerance(lhs, rhs), CheckMode::inequality);
}

}  // namespace

Evaluation evaluate(const Density2D& joint) {
  auto a = analyze(joint);
  auto f = fisher_report(a);
  auto e = entropy_report(a);
  return {std::move(a), f, e};
}

CheckResult check_epi(const Evaluation& e) {
  auto r = verdict("epi", e.entropy.npW, e.entropy.npX + e.entropy.npY, is_gaussian_product(e.analysis.joint));
  r.diagnostics["crossXY"] = e.fisher.crossXY;
  r.diagnostics["cov"] = e.fisher.moments.cov;
  if (std::abs(e.fisher.crossXY) > 1e-6) r.notes["dependence"] = "inputs are dependent: crossXY is nonzero";
  return r;
}

CheckResult check_epi(const Density2D& joint) { return check_epi(evaluate(joint)); }

CheckResult check_stam(const Density1D& dX, const Density1D& dY) {
  const auto e = evaluate(product_density(dX, dY));
  const double lhs = 1.0 / e.fisher.jW;
  const double rhs = 1.0 / e.fisher.jX + 1.0 / e.fisher.jY;
  auto r = verdict("stam", lhs, rhs, is_single_normal(dX) && is_single_normal(dY));
  r.diagnostics["jX"] = e.fisher.jX;
  r.diagnostics["jY"] = e.fisher.jY;
  r.diagnostics["jW"] = e.fisher.jW;
  return r;
}

CheckResult check_stam(const Density2D& joint) {
  if (joint.model()) {
    if (const auto* mix = std::get_if<GaussianMixture2D>(&*joint.model())) {
      return check_stam(Density1D::from_mixture(mix->marginal_x(), joint.grid_x()),
                        Density1D::from_mixture(mix->marginal_y(), joint.grid_y()));
    }
  }
  return check_stam(marginalize(joint, Axis::X), marginalize(joint, Axis::Y));
}

CheckResult check_prop4(const Evaluation& e) {
  const auto& f = e.fisher;
  const double a = f.jXX - f.jXY;
  const double b = f.jYY - f.jXY;
  const double c = f.jW - f.jXY;
  if (!(a > kDenominatorEps && b > kDenominatorEps && c > kDenominatorEps)) {
    auto r = skipped_check("prop4", "degenerate-denominator");
    r.diagnostics["jXXminusJXY"] = a;
    r.diagnostics["jYYminusJXY"] = b;
    r.diagnostics["jWminusJXY"] = c;
    return r;
  }
  const bool equality = is_gaussian(e.analysis.joint);
  auto r = verdict("prop4", 1.0 / c, 1.0 / a + 1.0 / b, equality);
  // J(W) ≤ (J_XX J_YY - J_XY²)/(J_XX + J_YY - 2J_XY), as bound minus J(W) ≥ 0.
  const double bound = (f.jXX * f.jYY - f.jXY * f.jXY) / (a + b);
  const auto inter = verdict("prop4_intermediate", bound, f.jW, equality);
  r.diagnostics["intermediateBound"] = bound;
  r.diagnostics["intermediateJW"] = f.jW;
  r.diagnostics["intermediateSlack"] = inter.slack;
  r.notes["intermediate"] = to_string(inter.status);
  if (equality) r.notes["equalityCase"] = "bivariate normal";
  if (r.pass && !inter.pass) {
    r.pass = false;
    r.status = CheckStatus::failed;
  }
  return r;
}

CheckResult check_prop4(const Density2D& joint) { return check_prop4(evaluate(joint)); }

CheckResult check_condition1(const Evaluation& e) {
  auto r = verdict("condition1", e.fisher.crossXY, 0.0, false);
  r.notes["schedule"] = "t = 0 only";
  return r;
}

CheckResult check_condition1(const Density2D& joint) { return check_condition1(evaluate(joint)); }

CheckResult check_condition_takano(const Evaluation& e) {
  const double lambda = std::sqrt(e.fisher.jX / e.fisher.jY);
  const double m2 = m_statistic_moment(e.analysis, lambda, 1.0 / lambda);
  auto r = verdict("takano", e.fisher.crossXY, m2, false);
  r.diagnostics["lambda"] = lambda;
  r.notes["schedule"] = "t = 0 only";
  return r;
}

CheckResult check_condition_takano(const Density2D& joint) { return check_condition_takano(evaluate(joint)); }

CheckResult check_cepi(const Evaluation& e) {
  auto r = verdict("cepi", e.entropy.npW, e.entropy.npXgY + e.entropy.npYgX, is_gaussian_product(e.analysis.joint));
  const auto c1 = check_condition1(e);
  r.diagnostics["crossXY"] = e.fisher.crossXY;
  r.diagnostics["s"] = (e.entropy.npXgY + e.entropy.npYgX) / e.entropy.npW;
  r.notes["condition1"] = to_string(c1.status);
  return r;
}

CheckResult check_cepi(const Density2D& joint) { return check_cepi(evaluate(joint)); }

CheckResult check_mixing_sufficient(const STrajectory& trajectory) {
  double worst_slack = std::numeric_limits<double>::infinity();
  double worst_lhs = 0.0, worst_rhs = 0.0, worst_t = 0.0;
  bool condition1 = true;
  bool sufficient = true;
  double min_cross = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  for (const auto& rec : trajectory.records) {
    if (!rec.fisher) continue;
    ++samples;
    const auto& f = *rec.fisher;
    const double vx = rec.moments.var_x;
    const double vy = rec.moments.var_y;
    const double lhs = rec.moments.cov;
    const double rhs = vx * vy * f.psi.value * std::sqrt(std::max(0.0, vx * f.jX * vy * f.jY - 1.0));
    const auto step = verdict("mixing_sufficient", lhs, rhs, false);
    sufficient = sufficient && step.pass;
    if (step.slack < worst_slack) {
      worst_slack = step.slack;
      worst_lhs = lhs;
      worst_rhs = rhs;
      worst_t = rec.t;
    }
    condition1 = condition1 && verdict("condition1", f.crossXY, 0.0, false).pass;
    min_cross = std::min(min_cross, f.crossXY);
  }
  if (samples == 0) return skipped_check("mixing_sufficient", "trajectory carries no Fisher reports");
  auto r = verdict("mixing_sufficient", worst_lhs, worst_rhs, false);
  r.diagnostics["worstTime"] = worst_t;
  r.diagnostics["minCrossXY"] = min_cross;
  r.diagnostics["samples"] = static_cast<double>(samples);
  r.notes["schedule"] = "every Euler step of the flow";
  r.notes["psi"] = "box-sup over unmasked grid points";
  r.notes["condition1"] = condition1 ? "passed" : "failed";
  if (sufficient && !condition1) {
    r.pass = false;
    r.status = CheckStatus::failed;
    r.notes["implication"] = "violated: bound holds but Condition 1 fails";
  } else if (!sufficient && condition1) {
    r.status = CheckStatus::inconclusive;
    r.notes["implication"] = "sufficient-not-necessary";
  }
  return r;
}

CheckResult check_mixing_threshold(const Evaluation& e) {
  const auto& px = e.analysis.px.values();
  const auto& py = e.analysis.py.values();
  const auto& gx = e.analysis.px.grid();
  const auto& gy = e.analysis.py.grid();
  bool equal = gx == gy;
  for (std::size_t i = 0; equal && i < px.size(); ++i) equal = std::abs(px[i] - py[i]) <= 1e-4;
  if (!equal) return skipped_check("mixing_threshold", "skipped-precondition: marginals differ");
  const double psi = e.fisher.psi.value;
  if (psi < 1e-9) {
    auto r = skipped_check("mixing_threshold", "divide-by-zero-psi");
    r.diagnostics["psi"] = psi;
    return r;
  }
  const double v = e.fisher.moments.var_x;
  const double cov = e.fisher.moments.cov / v;  // unit-variance scaling; ψ is scale free
  const double lhs = v * e.fisher.jX;
  const double rhs = std::sqrt(cov / psi + 1.0);
  // Stored as threshold minus J so that slack ≥ 0 means the bound holds.
  auto r = verdict("mixing_threshold", rhs, lhs, false);
  r.diagnostics["psi"] = psi;
  r.diagnostics["standardizedCov"] = cov;
  r.diagnostics["variance"] = v;
  r.diagnostics["squaredRatioThreshold"] = std::sqrt((cov / psi) * (cov / psi) + 1.0);
  r.notes["form"] = "lhs is the threshold, rhs the standardized J(X)";
  if (!r.pass) r.status = CheckStatus::inconclusive;
  return r;
}

CheckResult check_mixing_threshold(const Density2D& joint) { return check_mixing_threshold(evaluate(joint)); }

}  // namespace epilab
