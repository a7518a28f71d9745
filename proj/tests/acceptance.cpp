// Acceptance battery: one line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "epilab/cli.hpp"
#include "epilab/family.hpp"
#include "epilab/flow.hpp"
#include "epilab/gaussian_oracle.hpp"
#include "epilab/inequalities.hpp"

using namespace epilab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

const std::vector<double> kOracleR{-0.8, -0.5, -0.3, 0.0, 0.3, 0.5, 0.8};

Density2D gaussian(double r) { return build_density({"gaussian", {{"r", r}}, std::nullopt, kDefaultGridPoints, {}}); }
Density2D quartic(double b) { return build_density({"quartic", {{"b", b}}, std::nullopt, kDefaultGridPoints, {}}); }

Density1D normal1d(double var) {
  const double half = kDefaultBoxSds * std::sqrt(var);
  return Density1D::from_mixture(GaussianMixture1D({{1.0, 0.0, var}}), Grid1D(-half, half, kDefaultGridPoints));
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

Outcome criterion1() {
  Outcome o;
  double worst_fisher = 0.0, worst_np = 0.0;
  // Both the closed-form-gradient path and the finite-difference path.
  for (const auto& [r, tabulated] : [] {
         std::vector<std::pair<double, bool>> v;
         for (double r : kOracleR) v.insert(v.end(), {{r, false}, {r, true}});
         return v;
       }()) {
    const auto d = tabulated ? gaussian(r).as_tabulated() : gaussian(r);
    const auto a = analyze(d);
    const auto f = fisher_report(a);
    const auto e = entropy_report(a);
    const auto fo = oracle_fisher(unit_gaussian(r));
    const auto eo = oracle_entropy(unit_gaussian(r));
    for (auto [got, want] : {std::pair{f.jX, fo.jX}, {f.jY, fo.jY}, {f.jXX, fo.jXX}, {f.jYY, fo.jYY},
                             {f.jXY, fo.jXY}, {f.crossXY, fo.crossXY}, {f.jW, fo.jW}}) {
      worst_fisher = std::max(worst_fisher, std::abs(got - want));
    }
    for (auto [got, want] : {std::pair{e.npX, eo.npX}, {e.npY, eo.npY}, {e.npXgY, eo.npXgY}, {e.npYgX, eo.npYgX},
                             {e.npW, eo.npW}, {entropy_power(e.hJoint), entropy_power(eo.hJoint)}}) {
      worst_np = std::max(worst_np, rel(got, want));
    }
  }
  o.require(worst_fisher <= 1e-5, "Fisher scalar off oracle");
  o.require(worst_np <= 1e-4, "entropy power off oracle");
  o.detail = fmt::format("{} instances, max |Fisher - oracle| = {:.2e} (tol 1e-5), max rel entropy power error = {:.2e} (tol 1e-4)",
                         2 * kOracleR.size(), worst_fisher, worst_np) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst = 0.0;
  int evaluated = 0;
  for (double r : kOracleR) {
    const auto c = check_prop4(gaussian(r));
    if (c.status == CheckStatus::skipped) continue;
    ++evaluated;
    worst = std::max(worst, std::abs(c.slack) / std::abs(c.lhs));
    o.require(c.mode == CheckMode::equality_case, fmt::format("r={} not in equality mode", r));
    if (r == 0.5) {
      o.require(std::abs(c.lhs - 1.0) <= 1e-4 && std::abs(c.rhs - 1.0) <= 1e-4, "r=0.5 sides differ from 1");
    }
  }
  o.require(worst <= 1e-4, "slack above 1e-4 |lhs|");
  o.require(evaluated == static_cast<int>(kOracleR.size()), "unexpected skips");
  o.detail = fmt::format("{} instances, max |slack|/|lhs| = {:.2e} (tol 1e-4)", evaluated, worst) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst = 0.0;
  for (auto [vx, vy] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}, std::pair{2.0, 3.0}}) {
    const auto c = check_stam(normal1d(vx), normal1d(vy));
    // J of N(0, v) is 1/v, so both sides equal vx + vy.
    worst = std::max({worst, rel(c.lhs, c.rhs), rel(c.lhs, vx + vy), rel(c.rhs, vx + vy)});
    o.require(c.pass, fmt::format("({}, {}) failed", vx, vy));
  }
  o.require(worst <= 1e-4, "relative mismatch above 1e-4");
  o.detail = fmt::format("max relative error = {:.2e} (tol 1e-4)", worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto q0 = quartic(0.0);
  const Density1D bimodal = Density1D::from_mixture(GaussianMixture1D({{0.5, -2.0, 0.5}, {0.5, 2.0, 0.5}}),
                                                    Grid1D(-10.0, 10.0, kDefaultGridPoints));
  const Density1D skewed = Density1D::from_mixture(GaussianMixture1D({{0.7, -0.5, 0.4}, {0.3, 1.5, 1.0}}),
                                                   Grid1D(-9.0, 11.0, kDefaultGridPoints));
  const std::vector<std::pair<Density1D, Density1D>> pairs{{normal1d(1.0), normal1d(2.0)},
                                                           {normal1d(1.0), bimodal},
                                                           {bimodal, skewed},
                                                           {marginalize(q0, Axis::X), marginalize(q0, Axis::Y)}};
  double worst_slack = 0.0, worst_epi = 0.0;
  for (const auto& [dx, dy] : pairs) {
    const auto e = evaluate(product_density(dx, dy));
    const auto p4 = check_prop4(e);
    const auto st = check_stam(dx, dy);
    worst_slack = std::max(worst_slack, std::abs(p4.slack - st.slack));
    const auto cepi = check_cepi(e);
    const auto epi = check_epi(e);
    worst_epi = std::max(worst_epi, std::abs(cepi.slack - epi.slack));
    o.require(cepi.pass == epi.pass, "cepi and epi verdicts differ");
  }
  o.require(worst_slack <= 1e-6, "prop4 and stam slacks differ");
  o.detail = fmt::format("{} products, max |prop4 - stam slack| = {:.2e} (tol 1e-6), max |cepi - epi slack| = {:.2e}",
                         pairs.size(), worst_slack, worst_epi) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion5() {
  Outcome o;
  struct Triple {
    std::string label;
    Density2D density;
    NoiseCovariance cov;
    double t;
  };
  const std::vector<Triple> triples{
      {"gaussian r=0.5, C=I, t=0.5", gaussian(0.5), NoiseCovariance::identity(), 0.5},
      {"quartic b=0.5, C=[[1,0.4],[0.4,0.8]], t=0.1", quartic(0.5).as_tabulated(), NoiseCovariance{1.0, 0.4, 0.8}, 0.1},
      {"mixture, C=diag(0.5,1), t=0", build_density({"mixture", {{"r", 0.3}}, std::nullopt, kDefaultGridPoints, {}}),
       NoiseCovariance::diagonal(0.5, 1.0), 0.0}};
  std::string parts;
  for (const auto& tr : triples) {
    const auto c = check_de_bruijn(tr.density, tr.cov, tr.t);
    const double err = std::abs(c.lhs - c.rhs) / std::abs(c.rhs);
    o.require(err < 1e-2, tr.label + " off");
    parts += fmt::format("{}{}: rel {:.1e}", parts.empty() ? "" : ", ", tr.label, err);
  }
  // Closed-form anchor for the Gaussian triple: ½ tr(Σ_t^{-1}).
  const auto f = oracle_fisher(oracle_after_noise(unit_gaussian(0.5), 0.5, 0.5));
  const auto g = check_de_bruijn(triples[0].density, triples[0].cov, 0.5);
  o.require(rel(g.lhs, 0.5 * (f.jXX + f.jYY)) < 1e-2, "gaussian triple off closed form");
  o.detail = parts + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::string parts;
  for (const auto& [label, d] : {std::pair{std::string("gaussian r=0.5"), gaussian(0.5)},
                                 std::pair{std::string("quartic b=0.5"), quartic(0.5)}}) {
    const auto c = check_score_of_sum(analyze(d), 1e-3);
    o.require(c.pass && c.lhs <= 1e-3, label + " off");
    parts += fmt::format("{}{}: L2 distance {:.2e}", parts.empty() ? "" : ", ", label, c.lhs);
  }
  o.detail = parts + " (tol 1e-3)" + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

std::map<std::string, STrajectory> g_flows;

STrajectory flow_at_horizon(const Density2D& d) {
  FlowParams p;
  p.steps = 32;
  p.t_max = noise_horizon_t_max(d, p.steps, 100.0);
  return run_cepi_flow(d, p);
}

Outcome criterion7() {
  Outcome o;
  std::vector<std::pair<std::string, Density2D>> cases{{"gaussian r=0", gaussian(0.0)},
                                                       {"gaussian r=0.3", gaussian(0.3)},
                                                       {"gaussian r=0.5", gaussian(0.5)},
                                                       {"quartic b=0.3", quartic(0.3)},
                                                       {"quartic b=0.5", quartic(0.5)}};
  std::string parts;
  for (auto& [label, d] : cases) {
    auto tr = flow_at_horizon(d);
    const auto mono = check_s_monotone(tr, 1e-4);
    const auto hor = check_s_horizon(tr, 100.0, 0.02);
    o.require(mono.pass, label + " s decreases");
    o.require(hor.pass, label + " final s off 1");
    parts += fmt::format("{}{}: min ds {:.1e}, final s {:.4f}", parts.empty() ? "" : ", ", label, mono.lhs,
                         tr.records.back().s);
    g_flows.emplace(label, std::move(tr));
  }
  const auto neg = gaussian(-0.5);
  FlowParams p;
  p.steps = 8;
  p.t_max = 0.01;
  p.richardson = false;
  const auto tr = run_cepi_flow(neg, p);
  const double s0 = tr.records.front().s;
  const auto cepi = check_cepi(neg);
  o.require(std::abs(s0 - 1.5) <= 1e-3, "r=-0.5 s(0) off 1.5");
  o.require(cepi.status == CheckStatus::failed, "r=-0.5 cepi did not fail");
  parts += fmt::format(", gaussian r=-0.5: s(0) {:.6f}, cepi {}", s0, to_string(cepi.status));
  o.detail = parts + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion8() {
  Outcome o;
  int agree = 0;
  for (int k = -4; k <= 4; ++k) {
    const double r = 0.2 * k;
    const auto e = evaluate(gaussian(r));
    const bool cepi = check_cepi(e).pass;
    const bool cross = check_condition1(e).pass;
    // Closed-form sign of the cross term for the same r.
    const bool oracle_cross = oracle_fisher(unit_gaussian(r)).crossXY >= 0.0;
    if (cepi == cross && cross == oracle_cross) ++agree;
    else o.require(false, fmt::format("r={} disagrees", r));
  }
  o.detail = fmt::format("{}/9 values of r in (-0.9, 0.9) agree", agree) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto csv = std::filesystem::temp_directory_path() / "epilab_acceptance_tabulated.csv";
  {
    const auto q = build_density({"quartic", {{"b", 1.0}}, std::nullopt, 256, {}});
    std::ofstream os(csv);
    os.precision(17);
    os << "x,y,p\n";
    for (std::size_t i = 0; i < q.grid_x().size(); ++i)
      for (std::size_t j = 0; j < q.grid_y().size(); ++j)
        os << q.grid_x().point(i) << "," << q.grid_y().point(j) << "," << q.values()(i, j) << "\n";
  }
  std::vector<FamilySpec> instances{
      {"bivariate-gaussian", {{"r", -0.8}}, std::nullopt, kDefaultGridPoints, {}},
      {"bivariate-gaussian", {{"r", 0.0}}, std::nullopt, kDefaultGridPoints, {}},
      {"bivariate-gaussian", {{"r", 0.5}, {"vx", 2.0}, {"mx", 1.0}}, std::nullopt, kDefaultGridPoints, {}},
      {"gaussian-mixture", {}, std::nullopt, kDefaultGridPoints, {}},
      {"gaussian-mixture", {{"r", 0.4}, {"w", 0.3}, {"my2", -1.0}}, std::nullopt, kDefaultGridPoints, {}},
      {"quartic-fkg", {{"b", 0.0}}, std::nullopt, kDefaultGridPoints, {}},
      {"quartic-fkg", {{"b", 0.5}}, std::nullopt, kDefaultGridPoints, {}},
      {"quartic-fkg", {{"b", 2.0}}, std::nullopt, kDefaultGridPoints, {}},
      {"custom-tabulated", {}, std::nullopt, kDefaultGridPoints, csv.string()}};
  double worst = 0.0;
  for (const auto& spec : instances) {
    const auto c = m_identity_check(build_density(spec));
    worst = std::max(worst, std::abs(c.slack));
    o.require(c.pass, spec.name + " failed");
  }
  std::filesystem::remove(csv);
  o.require(worst <= 1e-4, "slack above 1e-4");
  o.detail = fmt::format("{} instances over all 4 families, max |slack| = {:.2e} (tol 1e-4)", instances.size(), worst) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::string parts;
  for (const char* label : {"gaussian r=0.3", "quartic b=0.3"}) {
    const auto it = g_flows.find(label);
    if (it == g_flows.end()) {
      o.require(false, std::string(label) + " trajectory missing");
      continue;
    }
    const auto c = check_psi_flow(it->second, 1e-6);
    o.require(c.pass, std::string(label) + " psi increased");
    parts += fmt::format("{}{}: psi(0) {:.6g}, max psi(t) {:.6g} over {} samples", parts.empty() ? "" : ", ", label,
                         c.lhs, c.rhs, it->second.records.size());
  }
  o.detail = parts + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome criterion11() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path();
  std::vector<std::string> outputs;
  for (const char* tag : {"a", "b"}) {
    const auto path = dir / fmt::format("epilab_acceptance_{}.json", tag);
    const auto cmd = fmt::format("{} verify --family gaussian --r 0.5 --checks all --output {}", EPI_LAB_BINARY,
                                 path.string());
    const int status = std::system(cmd.c_str());
    o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "verify exited nonzero");
    outputs.push_back(slurp(path));
    std::filesystem::remove(path);
  }
  o.require(!outputs[0].empty() && outputs[0] == outputs[1], "reports differ");
  o.detail = fmt::format("two runs, {} bytes each, identical: {}", outputs[0].size(), outputs[0] == outputs[1]) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Gaussian oracle agreement", criterion1},
      {"Fisher inequality equality case for Gaussians", criterion2},
      {"Stam equality for Gaussian pairs", criterion3},
      {"independence reduction", criterion4},
      {"de Bruijn identity", criterion5},
      {"score of the sum, two routes", criterion6},
      {"conditional EPI flow", criterion7},
      {"condition consistency on the Gaussian family", criterion8},
      {"M-statistic identity on every family", criterion9},
      {"psi-mixing along the flow", criterion10},
      {"determinism", criterion11}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2zu [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
