#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

namespace epilab {

struct GaussianComponent1D {
  double weight = 1.0;
  double mean = 0.0;
  double var = 1.0;
};

/// Finite mixture of univariate normals with closed-form log-derivative.
class GaussianMixture1D {
 public:
  explicit GaussianMixture1D(std::vector<GaussianComponent1D> components);

  const std::vector<GaussianComponent1D>& components() const noexcept { return components_; }
  double pdf(double x) const;
  double dlog(double x) const;
  double mean() const;
  double variance() const;

 private:
  std::vector<GaussianComponent1D> components_;
};

struct GaussianComponent2D {
  double weight = 1.0;
  double mx = 0.0;
  double my = 0.0;
  double vx = 1.0;
  double vy = 1.0;
  double cov = 0.0;
};

/// Finite mixture of bivariate normals. Gaussian smoothing maps a mixture to a
/// mixture, so smoothed densities keep their closed form.
class GaussianMixture2D {
 public:
  explicit GaussianMixture2D(std::vector<GaussianComponent2D> components);

  const std::vector<GaussianComponent2D>& components() const noexcept { return components_; }
  double pdf(double x, double y) const;
  std::array<double, 2> grad_log(double x, double y) const;
  GaussianMixture2D with_added_noise(double c11, double c12, double c22) const;
  GaussianMixture1D marginal_x() const;
  GaussianMixture1D marginal_y() const;
  std::optional<GaussianComponent2D> single() const;

 private:
  std::vector<GaussianComponent2D> components_;
};

/// p(x,y) ∝ exp(-(x/s)^4 - (y/s)^4 + b·x·y/s^2); log-supermodular for b ≥ 0.
class QuarticFkg {
 public:
  static constexpr double kMaxCoupling = 8.0;

  static QuarticFkg make(double coupling, double scale = 1.0);

  double coupling() const noexcept { return b_; }
  double scale() const noexcept { return s_; }
  /// Marginal standard deviation (both axes, by symmetry).
  double marginal_sd() const noexcept { return marginal_sd_; }
  double log_pdf(double x, double y) const;
  double pdf(double x, double y) const;
  std::array<double, 2> grad_log(double x, double y) const;

 private:
  QuarticFkg(double b, double s) : b_(b), s_(s) {}

  double b_;
  double s_;
  double log_norm_ = 0.0;
  double marginal_sd_ = 1.0;
};

using AnalyticModel = std::variant<GaussianMixture2D, QuarticFkg>;

double model_pdf(const AnalyticModel& model, double x, double y);
std::array<double, 2> model_grad_log(const AnalyticModel& model, double x, double y);

}  // namespace epilab
