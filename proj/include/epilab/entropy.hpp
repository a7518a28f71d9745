#pragma once

#include <cmath>
#include <utility>

#include "epilab/density.hpp"
#include "epilab/score.hpp"

namespace epilab {

/// All entropies in bits, so entropy powers are exactly 2^{2H}.
struct EntropyReport {
  double hX = 0.0;
  double hY = 0.0;
  double hJoint = 0.0;
  double hW = 0.0;
  double hXgivenY = 0.0;
  double hYgivenX = 0.0;
  double npX = 0.0;
  double npY = 0.0;
  double npXgY = 0.0;
  double npYgX = 0.0;
  double npW = 0.0;
};

inline constexpr double kLn2 = 0.69314718055994530942;

inline double bits_to_nats(double bits) { return bits * kLn2; }
inline double entropy_power(double bits) { return std::exp2(2.0 * bits); }

double entropy_1d(const Density1D& d);
double entropy_2d(const Density2D& joint);

/// (H(X|Y), H(Y|X)) by the chain rule.
std::pair<double, double> conditional_entropies(const Density2D& joint);

EntropyReport entropy_report(const JointAnalysis& a);
EntropyReport entropy_report(const Density2D& joint);

}  // namespace epilab
