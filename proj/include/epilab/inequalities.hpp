#pragma once

#include "epilab/check_result.hpp"
#include "epilab/density.hpp"
#include "epilab/entropy.hpp"
#include "epilab/flow.hpp"
#include "epilab/score.hpp"

namespace epilab {

/// Shared inputs for the t = 0 checks so one analysis feeds every verdict.
struct Evaluation {
  JointAnalysis analysis;
  FisherReport fisher;
  EntropyReport entropy;
};

Evaluation evaluate(const Density2D& joint);

/// npW ≥ npX + npY. Equality mode for a product of two normals.
CheckResult check_epi(const Evaluation& e);
CheckResult check_epi(const Density2D& joint);

/// 1/J(X+Y) ≥ 1/J(X) + 1/J(Y) for the product of dX and dY.
CheckResult check_stam(const Density1D& dX, const Density1D& dY);
/// Stam on the marginals of `joint`, coupled independently. Gaussian mixture
/// marginals keep their closed form.
CheckResult check_stam(const Density2D& joint);

/// 1/(J(W) - J_XY) ≥ 1/(J_XX - J_XY) + 1/(J_YY - J_XY), plus the intermediate
/// bound on J(W). Skipped when a denominator is at most 1e-8.
CheckResult check_prop4(const Evaluation& e);
CheckResult check_prop4(const Density2D& joint);

/// E ρ_X ρ_Y ≥ 0 at t = 0.
CheckResult check_condition1(const Evaluation& e);
CheckResult check_condition1(const Density2D& joint);

/// E ρ_X ρ_Y ≥ E M²_{λ,1/λ} with λ = sqrt(J(X)/J(Y)).
CheckResult check_condition_takano(const Evaluation& e);
CheckResult check_condition_takano(const Density2D& joint);

/// npW ≥ npXgY + npYgX; Condition 1 at t = 0 is attached, not enforced.
CheckResult check_cepi(const Evaluation& e);
CheckResult check_cepi(const Density2D& joint);

/// Cov ≥ v_X v_Y ψ sqrt(v_X J(X) v_Y J(Y) - 1) at every recorded flow step,
/// together with the implication that Condition 1 then holds at every step.
CheckResult check_mixing_sufficient(const STrajectory& trajectory);

/// Equal marginals only. After scaling to unit variance:
/// J(X) ≤ sqrt(Cov/ψ + 1).
CheckResult check_mixing_threshold(const Evaluation& e);
CheckResult check_mixing_threshold(const Density2D& joint);

}  // namespace epilab
