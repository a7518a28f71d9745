#pragma once

#include "epilab/analytic.hpp"
#include "epilab/entropy.hpp"
#include "epilab/score.hpp"

namespace epilab {

/// Bivariate normal described by its first two moments.
struct GaussianSpec {
  double meanX = 0.0;
  double meanY = 0.0;
  double vX = 1.0;
  double vY = 1.0;
  double cov = 0.0;

  double det() const noexcept { return vX * vY - cov * cov; }
};

GaussianSpec unit_gaussian(double r);
GaussianSpec to_spec(const GaussianComponent2D& c);

// Closed forms only; nothing here touches a grid or a quadrature rule.

/// J-matrix = Σ^{-1}, J(X) = 1/v_X, E ρ_X ρ_Y = cov/(v_X v_Y), J(W) = 1/(v_X + v_Y + 2cov).
FisherReport oracle_fisher(const GaussianSpec& spec);
EntropyReport oracle_entropy(const GaussianSpec& spec);
/// Adds independent noise variances f (on X) and g (on Y).
GaussianSpec oracle_after_noise(const GaussianSpec& spec, double f, double g);
/// (2^{2H(X|Y)} + 2^{2H(Y|X)}) / 2^{2H(X+Y)}.
double oracle_s(const GaussianSpec& spec);
/// E M_{a,b}^2; M is linear in (x, y) for a normal pair.
double oracle_m_moment(const GaussianSpec& spec, double a, double b);
/// p(x,y) / (p_X(x) p_Y(y)).
double oracle_dependence_ratio(const GaussianSpec& spec, double x, double y);

}  // namespace epilab
