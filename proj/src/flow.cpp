#include "epilab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "epilab/error.hpp"
#include "epilab/quadrature.hpp"

namespace epilab {
namespace {

constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;
// Box margin in noise standard deviations.
constexpr double kNoiseMarginSds = 8.0;
// Kernel entries beyond this many standard deviations are below 1e-31.
constexpr double kKernelCutoffSds = 12.0;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Rows: target nodes; columns: source nodes.
Eigen::MatrixXd axis_operator(const Grid1D& src, const Grid1D& dst, double var) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dst.size(), src.size());
  if (var == 0.0) {
    const long off = dst.aligned_offset(src);
    if (off < 0) {
      throw Error(ErrorKind::invalid_parameters, "noise-free axis needs a target grid aligned with the source grid");
    }
    for (std::size_t i = 0; i < src.size(); ++i) k(off + i, i) = 1.0;
    return k;
  }
  const double sd = std::sqrt(var);
  if (sd < 2.0 * src.spacing()) {
    throw Error(ErrorKind::kernel_underresolved,
                "noise standard deviation " + std::to_string(sd) + " is below two grid spacings (" +
                    std::to_string(2.0 * src.spacing()) + ")");
  }
  const auto w = trapezoid_weights(src);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  const double cutoff = kKernelCutoffSds * sd;
  for (std::size_t c = 0; c < src.size(); ++c) {
    const double u = src.point(c);
    for (std::size_t r = 0; r < dst.size(); ++r) {
      const double d = dst.point(r) - u;
      if (std::abs(d) > cutoff) continue;
      k(r, c) = w[c] * norm * std::exp(-0.5 * d * d / var);
    }
  }
  return k;
}

Density2D fft_smooth(const Density2D& padded, double s11, double s12, double s22) {
  const auto nx = static_cast<int>(padded.grid_x().size());
  const auto ny = static_cast<int>(padded.grid_y().size());
  const double hx = padded.grid_x().spacing();
  const double hy = padded.grid_y().spacing();
  // Eigen is column-major: element (i, j) sits at i + j·nx, i.e. a row-major
  // ny × nx array.
  const int nxc = nx / 2 + 1;
  std::vector<double> real(static_cast<std::size_t>(nx) * ny);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(ny) * nxc);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_plan forward, backward;
  {
    std::lock_guard lock(fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_2d(ny, nx, real.data(), cplx, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(ny, nx, cplx, real.data(), FFTW_ESTIMATE);
  }
  std::copy(padded.values().data(), padded.values().data() + real.size(), real.begin());
  fftw_execute(forward);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int q = 0; q < ny; ++q) {
    const int fq = q <= ny / 2 ? q : q - ny;
    const double ky = two_pi * fq / (ny * hy);
    for (int p = 0; p < nxc; ++p) {
      const double kx = two_pi * p / (nx * hx);
      const double expo = -0.5 * (s11 * kx * kx + 2.0 * s12 * kx * ky + s22 * ky * ky);
      spec[static_cast<std::size_t>(q) * nxc + p] *= std::exp(expo);
    }
  }
  fftw_execute(backward);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  const double scale = 1.0 / (static_cast<double>(nx) * ny);
  Eigen::MatrixXd out(nx, ny);
  for (std::size_t k = 0; k < real.size(); ++k) out.data()[k] = std::max(0.0, real[k] * scale);
  return Density2D::tabulated(padded.grid_x(), padded.grid_y(), std::move(out));
}

double nats(double bits) { return bits_to_nats(bits); }

/// Density at noise C·tau on fixed grids shared by every evaluation time.
Density2D density_at(const Density2D& joint, const NoiseCovariance& cov, double tau, const Grid1D& gx,
                     const Grid1D& gy) {
  if (tau <= 0.0 || cov.is_zero()) {
    return joint.model() ? joint.retabulated(gx, gy) : joint.padded(gx, gy);
  }
  if (joint.model() && std::holds_alternative<GaussianMixture2D>(*joint.model())) {
    const auto& mix = std::get<GaussianMixture2D>(*joint.model());
    return Density2D::from_model(mix.with_added_noise(cov.c11 * tau, cov.c12 * tau, cov.c22 * tau), gx, gy);
  }
  if (cov.is_diagonal()) return smooth_independent_onto(joint, cov.c11 * tau, cov.c22 * tau, gx, gy);
  return gaussian_smooth(joint.padded(gx, gy), cov, tau, SmoothOptions{false});
}

struct FdPlan {
  double step;
  std::vector<double> times;
  bool central;
  Grid1D gx;
  Grid1D gy;
};

FdPlan plan_fd(const Density2D& joint, const NoiseCovariance& cov, double t, std::optional<double> dt_fd) {
  const double step = dt_fd.value_or(default_fd_step(joint, cov));
  if (!(step > 0.0)) throw Error(ErrorKind::invalid_parameters, "finite-difference step must be positive");
  const bool central = t >= step;
  std::vector<double> times = central ? std::vector<double>{t - step, t, t + step}
                                      : std::vector<double>{t, t + step, t + 2.0 * step};
  const double tmax = times.back();
  const Grid1D gx = joint.grid_x().extended(kNoiseMarginSds * std::sqrt(cov.c11 * tmax));
  const Grid1D gy = joint.grid_y().extended(kNoiseMarginSds * std::sqrt(cov.c22 * tmax));
  return {step, std::move(times), central, gx, gy};
}

double fd_derivative(const FdPlan& plan, const std::vector<double>& v) {
  if (plan.central) return (v[2] - v[0]) / (2.0 * plan.step);
  return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * plan.step);
}

}  // namespace

double NoiseCovariance::min_positive_eigenvalue() const {
  const double tr = c11 + c22;
  const double det = c11 * c22 - c12 * c12;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (c11 - c22) * (c11 - c22) + c12 * c12));
  const double hi = 0.5 * tr + disc;
  const double lo = std::max(0.0, det) / std::max(hi, std::numeric_limits<double>::min());
  if (hi <= 0.0) return 0.0;
  return lo > 1e-14 * hi ? lo : hi;
}

void NoiseCovariance::validate() const {
  if (!std::isfinite(c11) || !std::isfinite(c12) || !std::isfinite(c22)) {
    throw Error(ErrorKind::invalid_parameters, "noise covariance must be finite");
  }
  if (c11 < 0.0 || c22 < 0.0 || c11 * c22 - c12 * c12 < -1e-14 * std::max(1.0, c11 * c22)) {
    throw Error(ErrorKind::invalid_parameters, "noise covariance must be positive semidefinite");
  }
}

Density2D smooth_independent_onto(const Density2D& source, double vx, double vy, const Grid1D& gx, const Grid1D& gy) {
  if (vx < 0.0 || vy < 0.0) throw Error(ErrorKind::invalid_parameters, "noise variances must be nonnegative");
  const Eigen::MatrixXd kx = axis_operator(source.grid_x(), gx, vx);
  const Eigen::MatrixXd ky = axis_operator(source.grid_y(), gy, vy);
  Eigen::MatrixXd out = kx * source.values() * ky.transpose();
  out = out.cwiseMax(0.0);
  return Density2D::tabulated(gx, gy, std::move(out));
}

Density2D gaussian_smooth(const Density2D& joint, const NoiseCovariance& cov, double dt, SmoothOptions options) {
  cov.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::invalid_parameters, "smoothing time must be positive");
  if (cov.is_zero()) return joint;
  const double s11 = cov.c11 * dt, s12 = cov.c12 * dt, s22 = cov.c22 * dt;
  Grid1D gx = joint.grid_x();
  Grid1D gy = joint.grid_y();
  if (options.extend_box) {
    gx = gx.extended(kNoiseMarginSds * std::sqrt(s11));
    gy = gy.extended(kNoiseMarginSds * std::sqrt(s22));
  }
  if (joint.model() && std::holds_alternative<GaussianMixture2D>(*joint.model())) {
    return Density2D::from_model(std::get<GaussianMixture2D>(*joint.model()).with_added_noise(s11, s12, s22), gx, gy);
  }
  if (cov.is_diagonal()) return smooth_independent_onto(joint, s11, s22, gx, gy);

  const double h = std::max(joint.grid_x().spacing(), joint.grid_y().spacing());
  const double sd = std::sqrt(cov.min_positive_eigenvalue() * dt);
  if (sd < 2.0 * h) {
    throw Error(ErrorKind::kernel_underresolved, "noise standard deviation " + std::to_string(sd) +
                                                     " along the narrow axis is below two grid spacings");
  }
  const Density2D base = (gx == joint.grid_x() && gy == joint.grid_y()) ? joint.as_tabulated() : joint.padded(gx, gy);
  return fft_smooth(base, s11, s12, s22);
}

double default_fd_step(const Density2D& joint, const NoiseCovariance& cov) {
  const double lam = cov.min_positive_eigenvalue();
  if (lam <= 0.0) return 1e-3;
  const double h = std::max(joint.grid_x().spacing(), joint.grid_y().spacing());
  // Slightly above the resolution limit so rounding cannot trip the check.
  return std::max(1e-3, 4.0 * h * h / lam * (1.0 + 1e-9));
}

CheckResult check_de_bruijn(const Density2D& joint, const NoiseCovariance& cov, double t, std::optional<double> dt_fd) {
  cov.validate();
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_parameters, "flow time must be nonnegative");
  if (cov.is_zero()) {
    auto r = make_check("de_bruijn", 0.0, 0.0, 1e-12, CheckMode::equality_case);
    r.notes["reason"] = "zero noise covariance: entropy is constant";
    return r;
  }
  const auto plan = plan_fd(joint, cov, t, dt_fd);
  std::vector<double> h;
  for (double tau : plan.times) h.push_back(nats(entropy_2d(density_at(joint, cov, tau, plan.gx, plan.gy))));
  const double lhs = fd_derivative(plan, h);
  const auto at_t = density_at(joint, cov, t, plan.gx, plan.gy);
  const auto f = fisher_report(at_t);
  const double rhs = 0.5 * (cov.c11 * f.jXX + 2.0 * cov.c12 * f.jXY + cov.c22 * f.jYY);
  auto r = make_check("de_bruijn", lhs, rhs, 1e-2 * std::abs(rhs) + 1e-12, CheckMode::equality_case);
  r.diagnostics["t"] = t;
  r.diagnostics["fdStep"] = plan.step;
  r.diagnostics["c11"] = cov.c11;
  r.diagnostics["c12"] = cov.c12;
  r.diagnostics["c22"] = cov.c22;
  r.diagnostics["jXX"] = f.jXX;
  r.diagnostics["jYY"] = f.jYY;
  r.diagnostics["jXY"] = f.jXY;
  r.diagnostics["relativeError"] = rhs != 0.0 ? std::abs(lhs - rhs) / std::abs(rhs) : std::abs(lhs);
  r.notes["difference"] = plan.central ? "central" : "forward second-order";
  return r;
}

CheckResult entropy_gap_derivative(const Density2D& joint, const NoiseCovariance& cov, std::optional<double> dt_fd) {
  cov.validate();
  const auto a0 = analyze(joint);
  const auto f = fisher_report(a0);
  const double a = f.jXX - f.jXY;
  const double b = f.jYY - f.jXY;
  if (!(a + b > 1e-8)) {
    auto r = skipped_check("entropy_gap_derivative", "degenerate-denominator: a + b <= 1e-8");
    r.diagnostics["a"] = a;
    r.diagnostics["b"] = b;
    return r;
  }
  const double rhs = (a * a * cov.c11 - 2.0 * a * b * cov.c12 + b * b * cov.c22) / (a + b);
  double lhs = 0.0;
  FdPlan plan{0.0, {}, false, joint.grid_x(), joint.grid_y()};
  if (!cov.is_zero()) {
    plan = plan_fd(joint, cov, 0.0, dt_fd);
    std::vector<double> gap;
    for (double tau : plan.times) {
      const auto d = density_at(joint, cov, tau, plan.gx, plan.gy);
      gap.push_back(2.0 * nats(entropy_2d(d)) - 2.0 * nats(entropy_1d(sum_density(d))));
    }
    lhs = fd_derivative(plan, gap);
  }
  auto r = make_check("entropy_gap_derivative", lhs, rhs, 1e-2 * std::abs(rhs) + 1e-4, CheckMode::inequality);
  // Exact derivative from de Bruijn's identity at t = 0.
  const double de_bruijn_lhs = cov.c11 * f.jXX + 2.0 * cov.c12 * f.jXY + cov.c22 * f.jYY -
                               (cov.c11 + 2.0 * cov.c12 + cov.c22) * f.jW;
  r.diagnostics["a"] = a;
  r.diagnostics["b"] = b;
  r.diagnostics["deBruijnLhs"] = de_bruijn_lhs;
  r.diagnostics["fdStep"] = plan.step;
  if (a * b >= 0.0 && rhs < -1e-12) {
    r.pass = false;
    r.status = CheckStatus::failed;
    r.notes["rhsSign"] = "negative lower bound although a*b >= 0";
  }
  return r;
}

double noise_horizon_t_max(const Density2D& initial, int steps, double factor) {
  if (steps < 1) throw Error(ErrorKind::invalid_parameters, "steps must be positive");
  const auto e = entropy_report(initial);
  const auto m = moments(initial);
  // f' ≥ N(X|Y) + 2πe·f, so Euler gives f_K ≥ N/(2πe)·((1 + 2πeΔ)^K - 1).
  auto step_for = [&](double var, double np) {
    const double target = 1.0 + factor * var * kTwoPiE / np;
    return (std::pow(target, 1.0 / steps) - 1.0) / kTwoPiE;
  };
  const double dt = std::max(step_for(m.var_x, e.npXgY), step_for(m.var_y, e.npYgX));
  return dt * steps * (1.0 + 1e-9);
}

namespace {

// Budget grids stay fine enough for the initial density.
constexpr double kFlowResolutionSds = 0.35;
constexpr std::size_t kMaxFlowGridPoints = 2048;

/// For tabulated inputs each budget axis keeps every `stride`-th node of the
/// initial axis; `first` is the initial-grid index of budget node 0.
struct FlowAxis {
  Grid1D grid;
  long stride = 1;
  long first = 0;
};

struct FlowGrids {
  FlowAxis x;
  FlowAxis y;
};

void require_budget(std::size_t n) {
  if (n > kMaxFlowGridPoints) {
    throw Error(ErrorKind::invalid_parameters,
                "flow horizon needs " + std::to_string(n) + " grid points per axis (limit " +
                    std::to_string(kMaxFlowGridPoints) + "); lower t_max or raise the step count");
  }
}

FlowAxis tabulated_axis(const Grid1D& g0, double margin, std::size_t target_n, double resolution) {
  const double h0 = g0.spacing();
  const double span = (g0.hi() - g0.lo()) + 2.0 * margin;
  long stride = std::max(1L, static_cast<long>(std::ceil(span / (h0 * static_cast<double>(target_n - 1)))));
  stride = std::min(stride, std::max(1L, static_cast<long>(std::floor(resolution / h0))));
  const double hc = stride * h0;
  const long before = static_cast<long>(std::ceil(margin / hc));
  const long fine_last = static_cast<long>(g0.size()) - 1;
  const long after = static_cast<long>(std::ceil((fine_last * h0 + margin) / hc));
  const auto n = static_cast<std::size_t>(before + after + 1);
  require_budget(n);
  const double lo = g0.lo() - before * hc;
  return {Grid1D(lo, lo + static_cast<double>(n - 1) * hc, n), stride, -before * stride};
}

FlowGrids plan_flow_grids(const Density2D& initial, const FlowParams& params, const Moments& m) {
  // Each Euler step adds at most 2πe·Var(X_t)·Δt = 2πe(v_X + f)Δt, so
  // f_K ≤ v_X((1 + 2πeΔ)^K - 1); the Richardson run takes half steps.
  const double dt = params.t_max / params.steps;
  const double growth = params.richardson ? std::pow(1.0 + 0.5 * kTwoPiE * dt, 2.0 * params.steps) - 1.0
                                          : std::pow(1.0 + kTwoPiE * dt, params.steps) - 1.0;
  const double mx = kNoiseMarginSds * std::sqrt(m.var_x * growth);
  const double my = kNoiseMarginSds * std::sqrt(m.var_y * growth);
  const double resolution = kFlowResolutionSds * std::sqrt(std::min(m.var_x, m.var_y));
  if (!initial.model()) {
    return {tabulated_axis(initial.grid_x(), mx, params.grid_n, resolution),
            tabulated_axis(initial.grid_y(), my, params.grid_n, resolution)};
  }
  const auto& gx0 = initial.grid_x();
  const auto& gy0 = initial.grid_y();
  const double half = std::max(std::max(std::abs(gx0.lo() - m.mean_x), std::abs(gx0.hi() - m.mean_x)) + mx,
                               std::max(std::abs(gy0.lo() - m.mean_y), std::abs(gy0.hi() - m.mean_y)) + my);
  const auto n = std::max(params.grid_n, static_cast<std::size_t>(std::ceil(2.0 * half / resolution)) + 1);
  require_budget(n);
  return {{Grid1D(m.mean_x - half, m.mean_x + half, n)}, {Grid1D(m.mean_y - half, m.mean_y + half, n)}};
}

Density2D decimated(const Density2D& initial, const FlowGrids& grids) {
  const auto nx = static_cast<long>(grids.x.grid.size());
  const auto ny = static_cast<long>(grids.y.grid.size());
  const auto& v = initial.values();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nx, ny);
  for (long j = 0; j < ny; ++j) {
    const long fj = grids.y.first + j * grids.y.stride;
    if (fj < 0 || fj >= v.cols()) continue;
    for (long i = 0; i < nx; ++i) {
      const long fi = grids.x.first + i * grids.x.stride;
      if (fi >= 0 && fi < v.rows()) out(i, j) = v(fi, fj);
    }
  }
  return Density2D::tabulated(grids.x.grid, grids.y.grid, std::move(out));
}

Density2D flow_density(const Density2D& initial, double f, double g, const FlowGrids& grids) {
  const auto& gx = grids.x.grid;
  const auto& gy = grids.y.grid;
  if (f == 0.0 && g == 0.0) return initial.model() ? initial.retabulated(gx, gy) : decimated(initial, grids);
  if (initial.model() && std::holds_alternative<GaussianMixture2D>(*initial.model())) {
    const auto& mix = std::get<GaussianMixture2D>(*initial.model());
    return Density2D::from_model(mix.with_added_noise(f, 0.0, g), gx, gy);
  }
  return smooth_independent_onto(initial, f, g, gx, gy);
}

double s_ratio(const EntropyReport& e) { return (e.npXgY + e.npYgX) / e.npW; }

std::vector<FlowRecord> euler_flow(const Density2D& initial, const FlowGrids& grids, double t_max, int steps,
                                   bool fisher) {
  const double dt = t_max / steps;
  std::vector<FlowRecord> out;
  out.reserve(steps + 1);
  double f = 0.0, g = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const auto joint = flow_density(initial, f, g, grids);
    FlowRecord rec;
    rec.t = k * dt;
    rec.f = f;
    rec.g = g;
    if (fisher) {
      const auto a = analyze(joint);
      rec.entropy = entropy_report(a);
      rec.fisher = fisher_report(a);
      rec.moments = rec.fisher->moments;
    } else {
      rec.entropy = entropy_report(joint);
      rec.moments = moments(joint);
    }
    rec.s = s_ratio(rec.entropy);
    out.push_back(rec);
    if (k < steps) {
      f += rec.entropy.npXgY * dt;
      g += rec.entropy.npYgX * dt;
    }
  }
  return out;
}

}  // namespace

STrajectory run_cepi_flow(const Density2D& initial, const FlowParams& params) {
  if (params.steps < 8) throw Error(ErrorKind::invalid_parameters, "flow needs at least 8 steps");
  if (!(params.t_max > 0.0) || !std::isfinite(params.t_max)) {
    throw Error(ErrorKind::invalid_parameters, "t_max must be positive");
  }
  const auto m = moments(initial);
  const auto grids = plan_flow_grids(initial, params, m);
  STrajectory traj{euler_flow(initial, grids, params.t_max, params.steps, params.fisher), grids.x.grid, grids.y.grid,
                   params,
                   std::nan(""), std::nan("")};
  if (params.richardson) {
    const auto fine = euler_flow(initial, grids, params.t_max, 2 * params.steps, false);
    traj.richardson_s = fine.back().s;
    traj.richardson_diff = std::abs(fine.back().s - traj.records.back().s);
    if (traj.richardson_diff > kRichardsonTolerance) {
      throw Error(ErrorKind::step_size_insufficient,
                  "final s changes by " + std::to_string(traj.richardson_diff) + " when the step is halved");
    }
  }
  return traj;
}

std::vector<std::pair<double, double>> condition1_along_flow(const STrajectory& trajectory) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : trajectory.records) {
    if (r.fisher) out.emplace_back(r.t, r.fisher->crossXY);
  }
  return out;
}

std::vector<std::pair<double, double>> condition1_along_flow(const Density2D& initial, const FlowParams& params) {
  FlowParams p = params;
  p.fisher = true;
  return condition1_along_flow(run_cepi_flow(initial, p));
}

CheckResult check_s_monotone(const STrajectory& trajectory, double slack) {
  const auto& rec = trajectory.records;
  double worst = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const double inc = rec[k].s - rec[k - 1].s;
    if (inc < worst) {
      worst = inc;
      worst_t = rec[k].t;
    }
  }
  auto r = make_check("s_monotone", worst, 0.0, slack, CheckMode::inequality);
  r.diagnostics["s0"] = rec.front().s;
  r.diagnostics["sFinal"] = rec.back().s;
  r.diagnostics["worstIncrementTime"] = worst_t;
  r.diagnostics["samples"] = static_cast<double>(rec.size());
  return r;
}

CheckResult check_s_horizon(const STrajectory& trajectory, double factor, double tolerance) {
  const auto& first = trajectory.records.front();
  const auto& last = trajectory.records.back();
  auto r = make_check("s_horizon", last.s, 1.0, tolerance, CheckMode::equality_case);
  const double fx = last.f / first.moments.var_x;
  const double gy = last.g / first.moments.var_y;
  r.diagnostics["noiseRatioX"] = fx;
  r.diagnostics["noiseRatioY"] = gy;
  if (fx < factor || gy < factor) {
    r.pass = false;
    r.status = CheckStatus::failed;
    r.notes["horizon"] = "accumulated noise below the requested multiple of the initial variances";
  }
  return r;
}

CheckResult check_condition1_flow(const STrajectory& trajectory) {
  const auto samples = condition1_along_flow(trajectory);
  if (samples.empty()) return skipped_check("condition1_flow", "trajectory carries no Fisher reports");
  auto worst = *std::min_element(samples.begin(), samples.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
  auto r = make_check("condition1_flow", worst.second, 0.0, inequality_tolerance(worst.second, 0.0),
                      CheckMode::inequality);
  r.diagnostics["worstTime"] = worst.first;
  r.diagnostics["samples"] = static_cast<double>(samples.size());
  r.notes["schedule"] = "every Euler step of the flow";
  return r;
}

CheckResult check_psi_flow(const STrajectory& trajectory, double slack) {
  const auto& rec = trajectory.records;
  if (!rec.front().fisher) return skipped_check("psi_flow", "trajectory carries no Fisher reports");
  const double psi0 = rec.front().fisher->psi.value;
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (const auto& r : rec) {
    if (r.fisher && r.fisher->psi.value > worst) {
      worst = r.fisher->psi.value;
      worst_t = r.t;
    }
  }
  auto r = make_check("psi_flow", psi0, worst, slack, CheckMode::inequality);
  r.diagnostics["worstTime"] = worst_t;
  r.notes["caveat"] = "box-sup: supremum over unmasked grid points of the truncated box";
  return r;
}

CheckResult check_fisher_flow_bound(const STrajectory& trajectory) {
  const auto& rec = trajectory.records;
  if (!rec.front().fisher) return skipped_check("fisher_flow_bound", "trajectory carries no Fisher reports");
  const double jx0 = rec.front().fisher->jX;
  const double jy0 = rec.front().fisher->jY;
  double worst = std::numeric_limits<double>::infinity();
  double worst_t = 0.0, worst_lhs = 0.0, worst_rhs = 0.0;
  for (const auto& r : rec) {
    if (!r.fisher) continue;
    const double bx = 1.0 / (1.0 / jx0 + r.f);
    const double by = 1.0 / (1.0 / jy0 + r.g);
    for (auto [j, b] : {std::pair{r.fisher->jX, bx}, std::pair{r.fisher->jY, by}}) {
      const double rel = (b - j) / b;
      if (rel < worst) {
        worst = rel;
        worst_t = r.t;
        worst_lhs = b;
        worst_rhs = j;
      }
    }
  }
  auto r = make_check("fisher_flow_bound", worst, 0.0, 1e-4, CheckMode::inequality);
  r.diagnostics["worstTime"] = worst_t;
  r.diagnostics["bound"] = worst_lhs;
  r.diagnostics["fisher"] = worst_rhs;
  r.notes["form"] = "lhs is the relative slack (bound - J)/bound";
  return r;
}

CheckResult check_moment_accounting(const STrajectory& trajectory) {
  const auto& rec = trajectory.records;
  const auto m0 = rec.front().moments;
  double worst_cov = 0.0, worst_var = 0.0;
  for (const auto& r : rec) {
    const double dc = std::abs(r.moments.cov - m0.cov) / std::max(std::abs(m0.cov), 1e-2 * std::sqrt(m0.var_x * m0.var_y));
    const double dvx = std::abs(r.moments.var_x - (m0.var_x + r.f)) / (m0.var_x + r.f);
    const double dvy = std::abs(r.moments.var_y - (m0.var_y + r.g)) / (m0.var_y + r.g);
    worst_cov = std::max(worst_cov, dc);
    worst_var = std::max({worst_var, dvx, dvy});
  }
  auto r = make_check("moment_accounting", std::max(worst_cov, worst_var), 0.0, 1e-4, CheckMode::equality_case);
  r.diagnostics["covRelativeDrift"] = worst_cov;
  r.diagnostics["varRelativeError"] = worst_var;
  return r;
}

}  // namespace epilab
