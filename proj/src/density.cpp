#include "epilab/density.hpp"

#include <algorithm>
#include <cmath>

#include "epilab/error.hpp"
#include "epilab/parallel.hpp"
#include "epilab/quadrature.hpp"

namespace epilab {
namespace {

void require_valid(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorKind::non_finite_input, "density value is not finite");
    if (x < 0.0) throw Error(ErrorKind::invalid_parameters, "density value is negative");
  }
}

void require_valid(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) throw Error(ErrorKind::non_finite_input, "density value is not finite");
  if (m.size() > 0 && m.minCoeff() < 0.0) throw Error(ErrorKind::invalid_parameters, "density value is negative");
}

}  // namespace

// ---------------------------------------------------------------------------
// Density1D

Density1D::Density1D(Grid1D grid, std::vector<double> values, std::optional<GaussianMixture1D> analytic)
    : grid_(grid), values_(std::move(values)), analytic_(std::move(analytic)) {
  if (values_.size() != grid_.size()) throw Error(ErrorKind::invalid_parameters, "values do not match grid");
  require_valid(values_);
  raw_mass_ = quadrature_1d(values_, grid_);
  if (!(raw_mass_ > 0.0)) throw Error(ErrorKind::invalid_parameters, "density has zero mass on its grid");
  for (double& v : values_) v /= raw_mass_;
  max_value_ = *std::max_element(values_.begin(), values_.end());
}

Density1D Density1D::tabulated(Grid1D grid, std::vector<double> values) {
  return Density1D(grid, std::move(values), std::nullopt);
}

Density1D Density1D::from_mixture(const GaussianMixture1D& mixture, Grid1D grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mixture.pdf(grid.point(i));
  return Density1D(grid, std::move(v), mixture);
}

double Density1D::mean() const {
  std::vector<double> f(values_.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = grid_.point(i) * values_[i];
  return quadrature_1d(f, grid_);
}

double Density1D::variance() const {
  const double m = mean();
  std::vector<double> f(values_.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = grid_.point(i) - m;
    f[i] = d * d * values_[i];
  }
  return quadrature_1d(f, grid_);
}

// ---------------------------------------------------------------------------
// Density2D

Density2D::Density2D(Grid1D gx, Grid1D gy, Eigen::MatrixXd values, std::optional<AnalyticModel> model)
    : gx_(gx), gy_(gy), values_(std::move(values)), model_(std::move(model)) {
  if (static_cast<std::size_t>(values_.rows()) != gx_.size() ||
      static_cast<std::size_t>(values_.cols()) != gy_.size()) {
    throw Error(ErrorKind::invalid_parameters, "values do not match grids");
  }
  require_valid(values_);
  raw_mass_ = quadrature_2d(values_, gx_, gy_);
  if (!(raw_mass_ > 0.0)) throw Error(ErrorKind::invalid_parameters, "density has zero mass on its grid");
  values_ /= raw_mass_;
  max_value_ = values_.maxCoeff();
}

Density2D Density2D::tabulated(Grid1D gx, Grid1D gy, Eigen::MatrixXd values) {
  return Density2D(gx, gy, std::move(values), std::nullopt);
}

Density2D Density2D::from_model(AnalyticModel model, Grid1D gx, Grid1D gy) {
  Eigen::MatrixXd v(gx.size(), gy.size());
  parallel_for(0, gy.size(), [&](std::size_t j) {
    const double y = gy.point(j);
    for (std::size_t i = 0; i < gx.size(); ++i) v(i, j) = model_pdf(model, gx.point(i), y);
  });
  return Density2D(gx, gy, std::move(v), std::move(model));
}

std::optional<GaussianComponent2D> Density2D::single_gaussian() const {
  if (!model_) return std::nullopt;
  if (const auto* mix = std::get_if<GaussianMixture2D>(&*model_)) return mix->single();
  return std::nullopt;
}

Density2D Density2D::as_tabulated() const {
  Density2D copy = *this;
  copy.model_.reset();
  return copy;
}

Density2D Density2D::retabulated(Grid1D gx, Grid1D gy) const {
  if (!model_) throw Error(ErrorKind::invalid_parameters, "only analytic-backed densities can be re-tabulated");
  return from_model(*model_, gx, gy);
}

Density2D Density2D::padded(Grid1D gx, Grid1D gy) const {
  const long ox = gx.aligned_offset(gx_);
  const long oy = gy.aligned_offset(gy_);
  if (ox < 0 || oy < 0) throw Error(ErrorKind::invalid_parameters, "padding grids are not aligned with the density grid");
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(gx.size(), gy.size());
  v.block(ox, oy, values_.rows(), values_.cols()) = values_;
  Density2D out(gx, gy, std::move(v), std::nullopt);
  out.raw_mass_ = raw_mass_;
  return out;
}

// ---------------------------------------------------------------------------
// Derived densities

Density1D marginalize(const Density2D& joint, Axis axis) {
  const auto& p = joint.values();
  if (axis == Axis::X) {
    const auto wy = trapezoid_weights(joint.grid_y());
    std::vector<double> out(joint.grid_x().size(), 0.0);
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.rows(); ++i) out[i] += wy[j] * p(i, j);
    }
    return Density1D::tabulated(joint.grid_x(), std::move(out));
  }
  const auto wx = trapezoid_weights(joint.grid_x());
  std::vector<double> out(joint.grid_y().size(), 0.0);
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) s += wx[i] * p(i, j);
    out[j] = s;
  }
  return Density1D::tabulated(joint.grid_y(), std::move(out));
}

Grid1D sum_grid(const Density2D& joint) {
  const auto& gx = joint.grid_x();
  const auto& gy = joint.grid_y();
  const double lo = gx.lo() + gy.lo();
  const double hi = gx.hi() + gy.hi();
  if (same_spacing(gx, gy)) return Grid1D(lo, hi, gx.size() + gy.size() - 1);
  const double h = std::min(gx.spacing(), gy.spacing());
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9)) + 1;
  return Grid1D(lo, hi, n);
}

std::vector<double> slice_integrals(const Density2D& joint, const Eigen::MatrixXd& g) {
  const auto& gx = joint.grid_x();
  const auto& gy = joint.grid_y();
  const Grid1D gw = sum_grid(joint);
  const auto nx = static_cast<long>(gx.size());
  const auto ny = static_cast<long>(gy.size());
  const double hx = gx.spacing();
  std::vector<double> out(gw.size(), 0.0);

  if (same_spacing(gx, gy)) {
    // x_i + y_j = w_k exactly when i + j = k.
    parallel_for(0, gw.size(), [&](std::size_t kk) {
      const long k = static_cast<long>(kk);
      const long i0 = std::max(0L, k - (ny - 1));
      const long i1 = std::min(nx - 1, k);
      if (i1 <= i0) return;
      double s = 0.5 * (g(i0, k - i0) + g(i1, k - i1));
      for (long i = i0 + 1; i < i1; ++i) s += g(i, k - i);
      out[kk] = s * hx;
    });
    return out;
  }

  const double hy = gy.spacing();
  parallel_for(0, gw.size(), [&](std::size_t k) {
    const double w = gw.point(k);
    long first = -1, last = -1;
    double s = 0.0;
    double edge_first = 0.0, edge_last = 0.0;
    for (long i = 0; i < nx; ++i) {
      const double t = (w - gx.point(i) - gy.lo()) / hy;
      if (t < 0.0 || t > static_cast<double>(ny - 1)) continue;
      auto j = static_cast<long>(std::floor(t));
      if (j >= ny - 1) j = ny - 2;
      const double frac = t - static_cast<double>(j);
      const double v = (1.0 - frac) * g(i, j) + frac * g(i, j + 1);
      if (first < 0) {
        first = i;
        edge_first = v;
      }
      last = i;
      edge_last = v;
      s += v;
    }
    if (first < 0 || last == first) return;
    out[k] = (s - 0.5 * (edge_first + edge_last)) * hx;
  });
  return out;
}

Density1D sum_density(const Density2D& joint) {
  auto values = slice_integrals(joint, joint.values());
  for (double& v : values) v = std::max(v, 0.0);
  return Density1D::tabulated(sum_grid(joint), std::move(values));
}

Density2D product_density(const Density1D& dx, const Density1D& dy) {
  if (!same_spacing(dx.grid(), dy.grid()) && dx.analytic() && dy.analytic()) {
    // Common spacing keeps the W-slices on grid nodes.
    const double h = std::min(dx.grid().spacing(), dy.grid().spacing());
    auto regrid = [h](const Density1D& d) {
      const auto& g = d.grid();
      const double span = g.hi() - g.lo();
      const auto n = static_cast<std::size_t>(std::ceil(span / h - 1e-9));
      const double mid = 0.5 * (g.lo() + g.hi());
      const double half = 0.5 * static_cast<double>(n) * h;
      return Density1D::from_mixture(*d.analytic(), Grid1D(mid - half, mid + half, n + 1));
    };
    return product_density(regrid(dx), regrid(dy));
  }
  if (dx.analytic() && dy.analytic()) {
    std::vector<GaussianComponent2D> comps;
    for (const auto& a : dx.analytic()->components()) {
      for (const auto& b : dy.analytic()->components()) {
        comps.push_back({a.weight * b.weight, a.mean, b.mean, a.var, b.var, 0.0});
      }
    }
    return Density2D::from_model(GaussianMixture2D(std::move(comps)), dx.grid(), dy.grid());
  }
  Eigen::Map<const Eigen::VectorXd> vx(dx.values().data(), static_cast<Eigen::Index>(dx.values().size()));
  Eigen::Map<const Eigen::VectorXd> vy(dy.values().data(), static_cast<Eigen::Index>(dy.values().size()));
  return Density2D::tabulated(dx.grid(), dy.grid(), vx * vy.transpose());
}

Moments moments(const Density2D& joint) {
  const auto& p = joint.values();
  const auto wx = trapezoid_weights(joint.grid_x());
  const auto wy = trapezoid_weights(joint.grid_y());
  const auto& gx = joint.grid_x();
  const auto& gy = joint.grid_y();
  double m0 = 0.0, mx = 0.0, my = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double w = wx[i] * wy[j] * p(i, j);
      m0 += w;
      mx += w * gx.point(i);
      my += w * gy.point(j);
    }
  }
  mx /= m0;
  my /= m0;
  Moments out{mx, my, 0.0, 0.0, 0.0};
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double dy = gy.point(j) - my;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double w = wx[i] * wy[j] * p(i, j);
      const double dx = gx.point(i) - mx;
      out.var_x += w * dx * dx;
      out.var_y += w * dy * dy;
      out.cov += w * dx * dy;
    }
  }
  out.var_x /= m0;
  out.var_y /= m0;
  out.cov /= m0;
  return out;
}

}  // namespace epilab
