#include "epilab/score.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "epilab/error.hpp"
#include "epilab/parallel.hpp"
#include "epilab/quadrature.hpp"

namespace epilab {
namespace {

// Centered first-derivative weights for offsets 1..m (antisymmetric).
constexpr std::array<double, 4> kStencil8 = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr std::array<double, 3> kStencil6 = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
constexpr std::array<double, 2> kStencil4 = {2.0 / 3.0, -1.0 / 12.0};
constexpr std::array<double, 1> kStencil2 = {1.0 / 2.0};

// Stencil points may sit below the mask floor but must not reach into
// values that are pure round-off.
constexpr double kStencilFloorRatio = 1e-4;

template <std::size_t M>
double apply(const std::array<double, M>& c, const std::vector<double>& lp, std::size_t i, double h) {
  double d = 0.0;
  for (std::size_t k = 0; k < M; ++k) d += c[k] * (lp[i + k + 1] - lp[i - k - 1]);
  return d / h;
}

double weighted_sum(const Eigen::MatrixXd& p, const Mask2D& mask, const std::vector<double>& wx,
                    const std::vector<double>& wy, const auto& integrand) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      if (mask(i, j)) continue;
      col += wx[i] * p(i, j) * integrand(i, j);
    }
    total += wy[j] * col;
  }
  return total;
}

double expect_1d(const Density1D& d, const Score1D& s, const auto& integrand) {
  const auto w = trapezoid_weights(d.grid());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (s.mask[i]) continue;
    total += w[i] * d.values()[i] * integrand(i);
  }
  return total;
}

}  // namespace

std::vector<double> log_derivative(std::span<const double> p, double h, double floor) {
  const std::size_t n = p.size();
  std::vector<double> out(n, 0.0);
  const double usable = floor * kStencilFloorRatio;
  std::vector<double> lp(n);
  std::vector<std::uint8_t> ok(n);
  for (std::size_t i = 0; i < n; ++i) {
    ok[i] = p[i] > usable && p[i] > 0.0;
    lp[i] = ok[i] ? std::log(p[i]) : 0.0;
  }
  auto span_ok = [&](std::size_t i, std::size_t m) {
    if (i < m || i + m >= n) return false;
    for (std::size_t k = i - m; k <= i + m; ++k) {
      if (!ok[k]) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] < floor || !ok[i]) continue;
    if (span_ok(i, 4)) {
      out[i] = apply(kStencil8, lp, i, h);
    } else if (span_ok(i, 3)) {
      out[i] = apply(kStencil6, lp, i, h);
    } else if (span_ok(i, 2)) {
      out[i] = apply(kStencil4, lp, i, h);
    } else if (span_ok(i, 1)) {
      out[i] = apply(kStencil2, lp, i, h);
    } else if (i + 2 < n && ok[i + 1] && ok[i + 2]) {
      out[i] = (-3.0 * lp[i] + 4.0 * lp[i + 1] - lp[i + 2]) / (2.0 * h);
    } else if (i >= 2 && ok[i - 1] && ok[i - 2]) {
      out[i] = (3.0 * lp[i] - 4.0 * lp[i - 1] + lp[i - 2]) / (2.0 * h);
    }
  }
  return out;
}

Score1D score_1d(const Density1D& d) {
  const double floor = kFloorRatio * d.max_value();
  Score1D s;
  s.mask.resize(d.values().size());
  for (std::size_t i = 0; i < s.mask.size(); ++i) s.mask[i] = d.values()[i] < floor;
  if (d.analytic()) {
    s.rho.resize(d.values().size());
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
      s.rho[i] = s.mask[i] ? 0.0 : d.analytic()->dlog(d.grid().point(i));
    }
  } else {
    s.rho = log_derivative(d.values(), d.grid().spacing(), floor);
  }
  return s;
}

namespace {

ScoreField joint_scores(const Density2D& joint, const Density1D& px, const Density1D& py) {
  const auto& p = joint.values();
  const auto nx = p.rows();
  const auto ny = p.cols();
  const double floor = kFloorRatio * joint.max_value();
  ScoreField s;
  s.mask = (p.array() < floor).cast<std::uint8_t>();
  s.rho1 = Eigen::MatrixXd::Zero(nx, ny);
  s.rho2 = Eigen::MatrixXd::Zero(nx, ny);

  if (joint.model()) {
    const auto& model = *joint.model();
    const auto& gx = joint.grid_x();
    const auto& gy = joint.grid_y();
    parallel_for(0, static_cast<std::size_t>(ny), [&](std::size_t j) {
      const double y = gy.point(j);
      for (Eigen::Index i = 0; i < nx; ++i) {
        if (s.mask(i, j)) continue;
        const auto g = model_grad_log(model, gx.point(i), y);
        s.rho1(i, j) = g[0];
        s.rho2(i, j) = g[1];
      }
    });
  } else {
    const double hx = joint.grid_x().spacing();
    const double hy = joint.grid_y().spacing();
    parallel_for(0, static_cast<std::size_t>(ny), [&](std::size_t j) {
      std::vector<double> col(p.col(j).data(), p.col(j).data() + nx);
      const auto d = log_derivative(col, hx, floor);
      for (Eigen::Index i = 0; i < nx; ++i) s.rho1(i, j) = d[i];
    });
    parallel_for(0, static_cast<std::size_t>(nx), [&](std::size_t i) {
      std::vector<double> row(ny);
      for (Eigen::Index j = 0; j < ny; ++j) row[j] = p(i, j);
      const auto d = log_derivative(row, hy, floor);
      for (Eigen::Index j = 0; j < ny; ++j) s.rho2(i, j) = d[j];
    });
  }
  s.rhoX = score_1d(px);
  s.rhoY = score_1d(py);
  return s;
}

}  // namespace

ScoreField score_2d(const Density2D& joint) {
  return joint_scores(joint, marginalize(joint, Axis::X), marginalize(joint, Axis::Y));
}

JointAnalysis analyze(const Density2D& joint) {
  auto px = marginalize(joint, Axis::X);
  auto py = marginalize(joint, Axis::Y);
  auto pw = sum_density(joint);
  auto scores = joint_scores(joint, px, py);
  auto rhoW = score_1d(pw);
  return JointAnalysis{joint, std::move(px), std::move(py), std::move(pw), std::move(scores), std::move(rhoW)};
}

PsiResult psi_mixing(const JointAnalysis& a) {
  const auto& p = a.joint.values();
  const auto& px = a.px.values();
  const auto& py = a.py.values();
  PsiResult best;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      if (a.scores.mask(i, j)) continue;
      const double prod = px[i] * py[j];
      if (!(prod > 0.0)) continue;
      const double dev = std::abs(p(i, j) / prod - 1.0);
      if (dev > best.value) best = {dev, a.joint.grid_x().point(i), a.joint.grid_y().point(j)};
    }
  }
  return best;
}

PsiResult psi_mixing(const Density2D& joint) { return psi_mixing(analyze(joint)); }

FisherReport fisher_report(const JointAnalysis& a) {
  const auto& p = a.joint.values();
  const auto& s = a.scores;
  const auto wx = trapezoid_weights(a.joint.grid_x());
  const auto wy = trapezoid_weights(a.joint.grid_y());
  FisherReport r;
  r.maskMass = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      if (s.mask(i, j)) r.maskMass += wx[i] * wy[j] * p(i, j);
    }
  }
  if (r.maskMass > kMaxMaskMass) {
    throw Error(ErrorKind::excessive_mask_loss, "masked region holds " + std::to_string(r.maskMass) + " of the mass");
  }
  r.jXX = weighted_sum(p, s.mask, wx, wy, [&](auto i, auto j) { return s.rho1(i, j) * s.rho1(i, j); });
  r.jYY = weighted_sum(p, s.mask, wx, wy, [&](auto i, auto j) { return s.rho2(i, j) * s.rho2(i, j); });
  r.jXY = weighted_sum(p, s.mask, wx, wy, [&](auto i, auto j) { return s.rho1(i, j) * s.rho2(i, j); });
  r.crossXY = weighted_sum(p, s.mask, wx, wy, [&](auto i, auto j) { return s.rhoX.rho[i] * s.rhoY.rho[j]; });
  r.jX = expect_1d(a.px, s.rhoX, [&](std::size_t i) { return s.rhoX.rho[i] * s.rhoX.rho[i]; });
  r.jY = expect_1d(a.py, s.rhoY, [&](std::size_t i) { return s.rhoY.rho[i] * s.rhoY.rho[i]; });
  r.jW = expect_1d(a.pw, a.rhoW, [&](std::size_t i) { return a.rhoW.rho[i] * a.rhoW.rho[i]; });
  r.psi = psi_mixing(a);
  r.massDeviation = a.joint.raw_mass() - 1.0;
  r.moments = moments(a.joint);
  return r;
}

FisherReport fisher_report(const Density2D& joint) { return fisher_report(analyze(joint)); }

double m_statistic_moment(const JointAnalysis& a, double ca, double cb) {
  if (ca == 0.0 && cb == 0.0) return 0.0;
  const auto& s = a.scores;
  const auto wx = trapezoid_weights(a.joint.grid_x());
  const auto wy = trapezoid_weights(a.joint.grid_y());
  return weighted_sum(a.joint.values(), s.mask, wx, wy, [&](auto i, auto j) {
    const double m = ca * (s.rho1(i, j) - s.rhoX.rho[i]) + cb * (s.rho2(i, j) - s.rhoY.rho[j]);
    return m * m;
  });
}

double m_statistic_moment(const Density2D& joint, double ca, double cb) {
  return m_statistic_moment(analyze(joint), ca, cb);
}

CheckResult m_identity_check(const JointAnalysis& a) {
  const auto f = fisher_report(a);
  const double lhs = m_statistic_moment(a, 1.0, -1.0);
  const double rhs = f.jXX - 2.0 * f.jXY + f.jYY - f.jX - f.jY - 2.0 * f.crossXY;
  auto r = make_check("m_identity", lhs, rhs, 1e-4, CheckMode::equality_case);
  r.diagnostics["jXX"] = f.jXX;
  r.diagnostics["jYY"] = f.jYY;
  r.diagnostics["jXY"] = f.jXY;
  r.diagnostics["jX"] = f.jX;
  r.diagnostics["jY"] = f.jY;
  r.diagnostics["crossXY"] = f.crossXY;
  return r;
}

CheckResult m_identity_check(const Density2D& joint) { return m_identity_check(analyze(joint)); }

Score1D score_of_sum_direct(const JointAnalysis& a) { return a.rhoW; }

ConditionalSumScores score_of_sum_conditional(const JointAnalysis& a) {
  const auto& p = a.joint.values();
  const Eigen::MatrixXd g1 = a.scores.rho1.cwiseProduct(p);
  const Eigen::MatrixXd g2 = a.scores.rho2.cwiseProduct(p);
  const auto den = slice_integrals(a.joint, p);
  const auto num1 = slice_integrals(a.joint, g1);
  const auto num2 = slice_integrals(a.joint, g2);
  ConditionalSumScores out;
  out.via_first.assign(den.size(), 0.0);
  out.via_second.assign(den.size(), 0.0);
  for (std::size_t k = 0; k < den.size(); ++k) {
    if (a.rhoW.mask[k] || !(den[k] > 0.0)) continue;
    out.via_first[k] = num1[k] / den[k];
    out.via_second[k] = num2[k] / den[k];
  }
  return out;
}

CheckResult check_score_of_sum(const JointAnalysis& a, double tolerance) {
  const auto& direct = a.rhoW;
  const auto cond = score_of_sum_conditional(a);
  auto dist = [&](const std::vector<double>& u, const std::vector<double>& v) {
    const double d2 = expect_1d(a.pw, direct, [&](std::size_t k) { return (u[k] - v[k]) * (u[k] - v[k]); });
    return std::sqrt(std::max(d2, 0.0));
  };
  const double d_first = dist(direct.rho, cond.via_first);
  const double d_second = dist(direct.rho, cond.via_second);
  const double d_between = dist(cond.via_first, cond.via_second);
  auto r = make_check("lemma3_score_of_sum", std::max(d_first, d_second), 0.0, tolerance, CheckMode::equality_case);
  r.diagnostics["l2DirectVsFirst"] = d_first;
  r.diagnostics["l2DirectVsSecond"] = d_second;
  r.diagnostics["l2FirstVsSecond"] = d_between;
  r.diagnostics["jW"] = expect_1d(a.pw, direct, [&](std::size_t k) { return direct.rho[k] * direct.rho[k]; });
  return r;
}

}  // namespace epilab
