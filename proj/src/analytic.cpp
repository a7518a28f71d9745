#include "epilab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epilab/error.hpp"

namespace epilab {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2π)

void validate_weights(double total) {
  if (!(std::abs(total - 1.0) < 1e-9)) {
    throw Error(ErrorKind::invalid_parameters, "mixture weights must sum to 1");
  }
}

}  // namespace

GaussianMixture1D::GaussianMixture1D(std::vector<GaussianComponent1D> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::invalid_parameters, "empty mixture");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.var > 0.0) || !(c.weight > 0.0) || !std::isfinite(c.mean)) {
      throw Error(ErrorKind::invalid_parameters, "mixture components need positive weight and variance");
    }
    total += c.weight;
  }
  validate_weights(total);
}

double GaussianMixture1D::pdf(double x) const {
  double p = 0.0;
  for (const auto& c : components_) {
    const double z = x - c.mean;
    p += c.weight * std::exp(-0.5 * z * z / c.var - 0.5 * (kLog2Pi + std::log(c.var)));
  }
  return p;
}

double GaussianMixture1D::dlog(double x) const {
  // Weighted average of component scores, weights in log space.
  std::vector<double> logw(components_.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const double z = x - c.mean;
    logw[k] = std::log(c.weight) - 0.5 * z * z / c.var - 0.5 * std::log(c.var);
    mx = std::max(mx, logw[k]);
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const double w = std::exp(logw[k] - mx);
    num += w * (-(x - c.mean) / c.var);
    den += w;
  }
  return num / den;
}

double GaussianMixture1D::mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

double GaussianMixture1D::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& c : components_) v += c.weight * (c.var + (c.mean - m) * (c.mean - m));
  return v;
}

GaussianMixture2D::GaussianMixture2D(std::vector<GaussianComponent2D> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorKind::invalid_parameters, "empty mixture");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.vx > 0.0) || !(c.vy > 0.0)) {
      throw Error(ErrorKind::invalid_parameters, "variances must be positive");
    }
    if (!(c.vx * c.vy - c.cov * c.cov > 0.0)) {
      throw Error(ErrorKind::invalid_parameters, "covariance must be positive definite (|r| < 1)");
    }
    if (!(c.weight > 0.0) || !std::isfinite(c.mx) || !std::isfinite(c.my)) {
      throw Error(ErrorKind::invalid_parameters, "mixture components need positive weight and finite mean");
    }
    total += c.weight;
  }
  validate_weights(total);
}

namespace {

struct ComponentEval {
  double log_density;  // includes log weight
  double gx;
  double gy;
};

ComponentEval eval_component(const GaussianComponent2D& c, double x, double y) {
  const double det = c.vx * c.vy - c.cov * c.cov;
  const double dx = x - c.mx;
  const double dy = y - c.my;
  // Σ^{-1} = [vy, -cov; -cov, vx] / det
  const double ix = (c.vy * dx - c.cov * dy) / det;
  const double iy = (c.vx * dy - c.cov * dx) / det;
  const double quad = dx * ix + dy * iy;
  return {std::log(c.weight) - 0.5 * quad - kLog2Pi - 0.5 * std::log(det), -ix, -iy};
}

}  // namespace

double GaussianMixture2D::pdf(double x, double y) const {
  double p = 0.0;
  for (const auto& c : components_) p += std::exp(eval_component(c, x, y).log_density);
  return p;
}

std::array<double, 2> GaussianMixture2D::grad_log(double x, double y) const {
  if (components_.size() == 1) {
    const auto e = eval_component(components_.front(), x, y);
    return {e.gx, e.gy};
  }
  std::vector<ComponentEval> evals;
  evals.reserve(components_.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    evals.push_back(eval_component(c, x, y));
    mx = std::max(mx, evals.back().log_density);
  }
  double gx = 0.0, gy = 0.0, den = 0.0;
  for (const auto& e : evals) {
    const double w = std::exp(e.log_density - mx);
    gx += w * e.gx;
    gy += w * e.gy;
    den += w;
  }
  return {gx / den, gy / den};
}

GaussianMixture2D GaussianMixture2D::with_added_noise(double c11, double c12, double c22) const {
  auto comps = components_;
  for (auto& c : comps) {
    c.vx += c11;
    c.vy += c22;
    c.cov += c12;
  }
  return GaussianMixture2D(std::move(comps));
}

GaussianMixture1D GaussianMixture2D::marginal_x() const {
  std::vector<GaussianComponent1D> out;
  for (const auto& c : components_) out.push_back({c.weight, c.mx, c.vx});
  return GaussianMixture1D(std::move(out));
}

GaussianMixture1D GaussianMixture2D::marginal_y() const {
  std::vector<GaussianComponent1D> out;
  for (const auto& c : components_) out.push_back({c.weight, c.my, c.vy});
  return GaussianMixture1D(std::move(out));
}

std::optional<GaussianComponent2D> GaussianMixture2D::single() const {
  if (components_.size() != 1) return std::nullopt;
  return components_.front();
}

QuarticFkg QuarticFkg::make(double coupling, double scale) {
  if (!std::isfinite(coupling) || coupling < 0.0) {
    throw Error(ErrorKind::invalid_parameters, "quartic-fkg requires coupling b >= 0");
  }
  if (coupling > kMaxCoupling) {
    throw Error(ErrorKind::invalid_parameters, "quartic-fkg coupling b must not exceed 8");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::invalid_parameters, "quartic-fkg scale must be positive");
  }
  QuarticFkg q(coupling, scale);
  // Reference normalization on the unit-scale box [-6, 6]^2: outside it the
  // log-density is below -600 for every admissible coupling.
  constexpr int n = 1201;
  constexpr double half = 6.0;
  const double h = 2.0 * half / (n - 1);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = -half + i * h;
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      peak = std::max(peak, -std::pow(u[i], 4) - std::pow(u[j], 4) + coupling * u[i] * u[j]);
    }
  }
  double mass = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wi = (i == 0 || i == n - 1) ? 0.5 * h : h;
    const double ui4 = std::pow(u[i], 4);
    for (int j = 0; j < n; ++j) {
      const double wj = (j == 0 || j == n - 1) ? 0.5 * h : h;
      const double v = std::exp(-ui4 - std::pow(u[j], 4) + coupling * u[i] * u[j] - peak);
      mass += wi * wj * v;
      m2 += wi * wj * v * u[i] * u[i];
    }
  }
  // Unit-scale normalizer, then account for the change of variables x = s·u.
  q.log_norm_ = peak + std::log(mass) + 2.0 * std::log(scale);
  q.marginal_sd_ = scale * std::sqrt(m2 / mass);
  return q;
}

double QuarticFkg::log_pdf(double x, double y) const {
  const double u = x / s_;
  const double v = y / s_;
  return -u * u * u * u - v * v * v * v + b_ * u * v - log_norm_;
}

double QuarticFkg::pdf(double x, double y) const { return std::exp(log_pdf(x, y)); }

std::array<double, 2> QuarticFkg::grad_log(double x, double y) const {
  const double u = x / s_;
  const double v = y / s_;
  return {(-4.0 * u * u * u + b_ * v) / s_, (-4.0 * v * v * v + b_ * u) / s_};
}

double model_pdf(const AnalyticModel& model, double x, double y) {
  return std::visit([&](const auto& m) { return m.pdf(x, y); }, model);
}

std::array<double, 2> model_grad_log(const AnalyticModel& model, double x, double y) {
  return std::visit([&](const auto& m) { return m.grad_log(x, y); }, model);
}

}  // namespace epilab
