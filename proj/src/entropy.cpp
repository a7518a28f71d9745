#include "epilab/entropy.hpp"

#include <cmath>

#include "epilab/quadrature.hpp"

namespace epilab {
namespace {

// p log2 p with the p < floor contributions dropped.
double plogp(double p, double floor) { return p < floor || p <= 0.0 ? 0.0 : p * std::log2(p); }

}  // namespace

double entropy_1d(const Density1D& d) {
  const double floor = kFloorRatio * d.max_value();
  const auto w = trapezoid_weights(d.grid());
  double h = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) h -= w[i] * plogp(d.values()[i], floor);
  return h;
}

double entropy_2d(const Density2D& joint) {
  const auto& p = joint.values();
  const double floor = kFloorRatio * joint.max_value();
  const auto wx = trapezoid_weights(joint.grid_x());
  const auto wy = trapezoid_weights(joint.grid_y());
  double h = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) col += wx[i] * plogp(p(i, j), floor);
    h -= wy[j] * col;
  }
  return h;
}

std::pair<double, double> conditional_entropies(const Density2D& joint) {
  const double hj = entropy_2d(joint);
  return {hj - entropy_1d(marginalize(joint, Axis::Y)), hj - entropy_1d(marginalize(joint, Axis::X))};
}

namespace {

EntropyReport assemble(const Density2D& joint, const Density1D& px, const Density1D& py, const Density1D& pw) {
  EntropyReport r;
  r.hX = entropy_1d(px);
  r.hY = entropy_1d(py);
  r.hJoint = entropy_2d(joint);
  r.hW = entropy_1d(pw);
  r.hXgivenY = r.hJoint - r.hY;
  r.hYgivenX = r.hJoint - r.hX;
  r.npX = entropy_power(r.hX);
  r.npY = entropy_power(r.hY);
  r.npXgY = entropy_power(r.hXgivenY);
  r.npYgX = entropy_power(r.hYgivenX);
  r.npW = entropy_power(r.hW);
  return r;
}

}  // namespace

EntropyReport entropy_report(const JointAnalysis& a) { return assemble(a.joint, a.px, a.py, a.pw); }

EntropyReport entropy_report(const Density2D& joint) {
  return assemble(joint, marginalize(joint, Axis::X), marginalize(joint, Axis::Y), sum_density(joint));
}

}  // namespace epilab
