#include "epilab/gaussian_oracle.hpp"

#include <cmath>
#include <numbers>

#include "epilab/error.hpp"

namespace epilab {
namespace {

constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

void validate(const GaussianSpec& s) {
  if (!(s.vX > 0.0) || !(s.vY > 0.0) || !(s.det() > 0.0)) {
    throw Error(ErrorKind::invalid_parameters, "Gaussian spec must be positive definite");
  }
}

}  // namespace

GaussianSpec unit_gaussian(double r) { return GaussianSpec{0.0, 0.0, 1.0, 1.0, r}; }

GaussianSpec to_spec(const GaussianComponent2D& c) { return GaussianSpec{c.mx, c.my, c.vx, c.vy, c.cov}; }

FisherReport oracle_fisher(const GaussianSpec& s) {
  validate(s);
  FisherReport r;
  const double det = s.det();
  r.jXX = s.vY / det;
  r.jYY = s.vX / det;
  r.jXY = -s.cov / det;
  r.jX = 1.0 / s.vX;
  r.jY = 1.0 / s.vY;
  r.crossXY = s.cov / (s.vX * s.vY);
  r.jW = 1.0 / (s.vX + s.vY + 2.0 * s.cov);
  r.moments = Moments{s.meanX, s.meanY, s.vX, s.vY, s.cov};
  return r;
}

EntropyReport oracle_entropy(const GaussianSpec& s) {
  validate(s);
  EntropyReport r;
  r.hX = 0.5 * std::log2(kTwoPiE * s.vX);
  r.hY = 0.5 * std::log2(kTwoPiE * s.vY);
  r.hJoint = 0.5 * std::log2(kTwoPiE * kTwoPiE * s.det());
  r.hW = 0.5 * std::log2(kTwoPiE * (s.vX + s.vY + 2.0 * s.cov));
  r.hXgivenY = 0.5 * std::log2(kTwoPiE * s.det() / s.vY);
  r.hYgivenX = 0.5 * std::log2(kTwoPiE * s.det() / s.vX);
  r.npX = kTwoPiE * s.vX;
  r.npY = kTwoPiE * s.vY;
  r.npXgY = kTwoPiE * s.det() / s.vY;
  r.npYgX = kTwoPiE * s.det() / s.vX;
  r.npW = kTwoPiE * (s.vX + s.vY + 2.0 * s.cov);
  return r;
}

GaussianSpec oracle_after_noise(const GaussianSpec& s, double f, double g) {
  if (f < 0.0 || g < 0.0) throw Error(ErrorKind::invalid_parameters, "noise variances must be nonnegative");
  GaussianSpec out = s;
  out.vX += f;
  out.vY += g;
  return out;
}

double oracle_s(const GaussianSpec& s) {
  const auto e = oracle_entropy(s);
  return (e.npXgY + e.npYgX) / e.npW;
}

double oracle_m_moment(const GaussianSpec& s, double a, double b) {
  validate(s);
  const double det = s.det();
  const double p11 = s.vY / det, p22 = s.vX / det, p12 = -s.cov / det;
  // ρ1 - ρ_X = (1/v_X - P11)·dx - P12·dy ; ρ2 - ρ_Y = -P12·dx + (1/v_Y - P22)·dy
  const double cx = a * (1.0 / s.vX - p11) - b * p12;
  const double cy = -a * p12 + b * (1.0 / s.vY - p22);
  return cx * cx * s.vX + 2.0 * cx * cy * s.cov + cy * cy * s.vY;
}

double oracle_dependence_ratio(const GaussianSpec& s, double x, double y) {
  validate(s);
  const double dx = x - s.meanX, dy = y - s.meanY;
  const double det = s.det();
  const double q_joint = (s.vY * dx * dx - 2.0 * s.cov * dx * dy + s.vX * dy * dy) / det;
  const double q_prod = dx * dx / s.vX + dy * dy / s.vY;
  return std::sqrt(s.vX * s.vY / det) * std::exp(-0.5 * (q_joint - q_prod));
}

}  // namespace epilab
