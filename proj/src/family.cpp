#include "epilab/family.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "epilab/error.hpp"

namespace epilab {
namespace {

const FamilyInfo* find_family(const std::string& name) {
  for (const auto& f : family_registry()) {
    if (f.name == name) return &f;
    if (std::find(f.aliases.begin(), f.aliases.end(), name) != f.aliases.end()) return &f;
  }
  return nullptr;
}

std::map<std::string, double> resolve_params(const FamilyInfo& info, const std::map<std::string, double>& given) {
  std::map<std::string, double> out;
  for (const auto& p : info.params) out[p.name] = p.default_value;
  for (const auto& [k, v] : given) {
    if (!out.contains(k)) {
      throw Error(ErrorKind::invalid_parameters, "family " + info.name + " has no parameter '" + k + "'");
    }
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_parameters, "parameter '" + k + "' is not finite");
    out[k] = v;
  }
  return out;
}

struct Box {
  double cx, cy, half;
};

std::pair<Grid1D, Grid1D> grids_for(const FamilySpec& spec, const Box& box) {
  if (spec.grid) {
    Grid1D g(spec.grid->lo, spec.grid->hi, spec.grid->n);
    return {g, g};
  }
  return {Grid1D(box.cx - box.half, box.cx + box.half, spec.grid_n),
          Grid1D(box.cy - box.half, box.cy + box.half, spec.grid_n)};
}

void require_captured(const Density2D& d) {
  if (d.raw_mass() < 1.0 - kMassTolerance) {
    throw Error(ErrorKind::grid_too_small,
                "box captures only " + std::to_string(d.raw_mass()) + " of the probability mass");
  }
}

Density2D build_gaussian(const FamilySpec& spec, const std::map<std::string, double>& p) {
  const double r = p.at("r");
  const double vx = p.at("vx");
  const double vy = p.at("vy");
  if (!(std::abs(r) < 1.0)) throw Error(ErrorKind::invalid_parameters, "bivariate-gaussian requires |r| < 1");
  if (!(vx > 0.0) || !(vy > 0.0)) throw Error(ErrorKind::invalid_parameters, "variances must be positive");
  const GaussianComponent2D c{1.0, p.at("mx"), p.at("my"), vx, vy, r * std::sqrt(vx * vy)};
  const Box box{c.mx, c.my, kDefaultBoxSds * std::sqrt(std::max(vx, vy))};
  auto [gx, gy] = grids_for(spec, box);
  auto d = Density2D::from_model(GaussianMixture2D({c}), gx, gy);
  require_captured(d);
  return d;
}

Density2D build_mixture(const FamilySpec& spec, const std::map<std::string, double>& p) {
  const double w = p.at("w");
  const double r = p.at("r");
  const double vx = p.at("vx");
  const double vy = p.at("vy");
  if (!(w > 0.0 && w < 1.0)) throw Error(ErrorKind::invalid_parameters, "mixture weight w must lie in (0, 1)");
  if (!(std::abs(r) < 1.0)) throw Error(ErrorKind::invalid_parameters, "component correlation requires |r| < 1");
  if (!(vx > 0.0) || !(vy > 0.0)) throw Error(ErrorKind::invalid_parameters, "variances must be positive");
  const double cov = r * std::sqrt(vx * vy);
  const GaussianComponent2D a{w, p.at("mx1"), p.at("my1"), vx, vy, cov};
  const GaussianComponent2D b{1.0 - w, p.at("mx2"), p.at("my2"), vx, vy, cov};
  const double sd = std::sqrt(std::max(vx, vy));
  const double xlo = std::min(a.mx, b.mx), xhi = std::max(a.mx, b.mx);
  const double ylo = std::min(a.my, b.my), yhi = std::max(a.my, b.my);
  const double half = 0.5 * std::max(xhi - xlo, yhi - ylo) + kDefaultBoxSds * sd;
  const Box box{0.5 * (xlo + xhi), 0.5 * (ylo + yhi), half};
  auto [gx, gy] = grids_for(spec, box);
  auto d = Density2D::from_model(GaussianMixture2D({a, b}), gx, gy);
  require_captured(d);
  return d;
}

Density2D build_quartic(const FamilySpec& spec, const std::map<std::string, double>& p) {
  const auto model = QuarticFkg::make(p.at("b"), p.at("scale"));
  const Box box{0.0, 0.0, kDefaultBoxSds * model.marginal_sd()};
  auto [gx, gy] = grids_for(spec, box);
  auto d = Density2D::from_model(model, gx, gy);
  require_captured(d);
  return d;
}

}  // namespace

const std::vector<FamilyInfo>& family_registry() {
  static const std::vector<FamilyInfo> registry = {
      {"bivariate-gaussian",
       {"gaussian"},
       "bivariate normal with correlation r",
       {{"r", 0.0, "correlation, |r| < 1"},
        {"vx", 1.0, "variance of X"},
        {"vy", 1.0, "variance of Y"},
        {"mx", 0.0, "mean of X"},
        {"my", 0.0, "mean of Y"}}},
      {"gaussian-mixture",
       {"mixture"},
       "two-component bivariate normal mixture with shared component covariance",
       {{"w", 0.5, "weight of the first component"},
        {"mx1", -1.5, "first component mean, x"},
        {"my1", -1.5, "first component mean, y"},
        {"mx2", 1.5, "second component mean, x"},
        {"my2", 1.5, "second component mean, y"},
        {"vx", 1.0, "component variance of X"},
        {"vy", 1.0, "component variance of Y"},
        {"r", 0.0, "component correlation"}}},
      {"quartic-fkg",
       {"quartic"},
       "density proportional to exp(-(x/s)^4 - (y/s)^4 + b x y / s^2); log-concave marginals, FKG for b >= 0",
       {{"b", 0.5, "coupling, 0 <= b <= 8"}, {"scale", 1.0, "length scale s"}}},
      {"custom-tabulated",
       {"tabulated"},
       "user-supplied CSV of (x, y, p) triples on a uniform grid (set \"source\")",
       {}},
  };
  return registry;
}

std::optional<std::string> canonical_family(const std::string& name) {
  if (const auto* f = find_family(name)) return f->name;
  return std::nullopt;
}

BuiltFamily build_family(const FamilySpec& spec) {
  const FamilyInfo* info = find_family(spec.name);
  if (!info) throw Error(ErrorKind::invalid_parameters, "unknown family '" + spec.name + "'");
  const auto params = resolve_params(*info, spec.params);
  if (info->name == "bivariate-gaussian") return {build_gaussian(spec, params), {}};
  if (info->name == "gaussian-mixture") return {build_mixture(spec, params), {}};
  if (info->name == "quartic-fkg") return {build_quartic(spec, params), {}};
  if (spec.source.empty()) throw Error(ErrorKind::invalid_parameters, "custom-tabulated requires a source CSV");
  return load_tabulated_csv(spec.source);
}

Density2D build_density(const FamilySpec& spec) { return build_family(spec).density; }

FamilySpec family_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("name") || !doc["name"].is_string()) {
    throw Error(ErrorKind::config_invalid, "family document needs a string \"name\"");
  }
  FamilySpec spec;
  spec.name = doc["name"].get<std::string>();
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw Error(ErrorKind::config_invalid, "\"params\" must be an object");
    for (const auto& [k, v] : doc["params"].items()) {
      if (!v.is_number()) throw Error(ErrorKind::config_invalid, "parameter '" + k + "' must be a number");
      spec.params[k] = v.get<double>();
    }
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (!g.is_object() || !g.contains("n") || !g["n"].is_number_integer()) {
      throw Error(ErrorKind::config_invalid, "\"grid\" needs an integer \"n\"");
    }
    const auto n = g["n"].get<long>();
    if (n < static_cast<long>(Grid1D::kMinPoints)) throw Error(ErrorKind::config_invalid, "grid n must be at least 16");
    if (g.contains("lo") || g.contains("hi")) {
      if (!g.contains("lo") || !g.contains("hi") || !g["lo"].is_number() || !g["hi"].is_number()) {
        throw Error(ErrorKind::config_invalid, "grid needs both numeric \"lo\" and \"hi\"");
      }
      spec.grid = GridSpec{g["lo"].get<double>(), g["hi"].get<double>(), static_cast<std::size_t>(n)};
    } else {
      spec.grid_n = static_cast<std::size_t>(n);
    }
  }
  if (doc.contains("source")) {
    if (!doc["source"].is_string()) throw Error(ErrorKind::config_invalid, "\"source\" must be a string");
    spec.source = doc["source"].get<std::string>();
  }
  return spec;
}

nlohmann::json family_to_json(const FamilySpec& spec) {
  nlohmann::json out;
  out["name"] = canonical_family(spec.name).value_or(spec.name);
  out["params"] = nlohmann::json::object();
  for (const auto& [k, v] : spec.params) out["params"][k] = v;
  if (spec.grid) {
    out["grid"] = {{"lo", spec.grid->lo}, {"hi", spec.grid->hi}, {"n", spec.grid->n}};
  } else {
    out["grid"] = {{"n", spec.grid_n}};
  }
  if (!spec.source.empty()) out["source"] = spec.source;
  return out;
}

BuiltFamily load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_parameters, "cannot open tabulated density '" + path + "'");
  std::vector<std::array<double, 3>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::array<double, 3> r{};
    if (!(ss >> r[0] >> r[1] >> r[2])) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw Error(ErrorKind::invalid_parameters, "malformed CSV row: " + line);
    }
    first = false;
    rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorKind::invalid_parameters, "tabulated density is empty");

  auto axis_from = [](std::set<double> values) {
    const std::vector<double> v(values.begin(), values.end());
    if (v.size() < Grid1D::kMinPoints) throw Error(ErrorKind::invalid_parameters, "tabulated axis has too few points");
    const Grid1D g(v.front(), v.back(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i] - g.point(i)) > 1e-3 * g.spacing()) {
        throw Error(ErrorKind::invalid_parameters, "tabulated axis is not uniformly spaced");
      }
    }
    return g;
  };
  std::set<double> xs, ys;
  for (const auto& r : rows) {
    xs.insert(r[0]);
    ys.insert(r[1]);
  }
  const Grid1D gx = axis_from(xs);
  const Grid1D gy = axis_from(ys);
  if (rows.size() != gx.size() * gy.size()) {
    throw Error(ErrorKind::invalid_parameters, "tabulated density does not cover the full product grid");
  }
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(gx.size(), gy.size(), -1.0);
  for (const auto& r : rows) {
    const auto i = static_cast<Eigen::Index>(std::llround((r[0] - gx.lo()) / gx.spacing()));
    const auto j = static_cast<Eigen::Index>(std::llround((r[1] - gy.lo()) / gy.spacing()));
    v(i, j) = r[2];
  }
  auto density = Density2D::tabulated(gx, gy, std::move(v));
  BuiltFamily out{std::move(density), {}};
  if (std::abs(out.density.raw_mass() - 1.0) > 1e-3) {
    out.warnings.push_back("tabulated density renormalized: input mass " + std::to_string(out.density.raw_mass()));
  }
  return out;
}

}  // namespace epilab
