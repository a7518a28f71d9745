#include "epilab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <fmt/core.h>

#include "epilab/error.hpp"

namespace epilab {
namespace {

// Shortest round-trip form so reports are stable across runs.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

}  // namespace

nlohmann::json to_json(const Grid1D& grid) {
  return {{"lo", grid.lo()}, {"hi", grid.hi()}, {"n", grid.size()}, {"spacing", grid.spacing()}};
}

nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["slack"] = c.slack;
  j["pass"] = c.pass;
  j["tolerance"] = c.tolerance;
  j["mode"] = to_string(c.mode);
  j["status"] = to_string(c.status);
  j["source"] = c.source;
  j["diagnostics"] = c.diagnostics;
  j["notes"] = c.notes;
  return j;
}

nlohmann::json to_json(const FisherReport& f) {
  return {{"jX", f.jX},
          {"jY", f.jY},
          {"jXX", f.jXX},
          {"jYY", f.jYY},
          {"jXY", f.jXY},
          {"crossXY", f.crossXY},
          {"jW", f.jW},
          {"maskMass", f.maskMass},
          {"psi", f.psi.value},
          {"boxSupLocation", {f.psi.x, f.psi.y}},
          {"massDeviation", f.massDeviation},
          {"moments",
           {{"meanX", f.moments.mean_x},
            {"meanY", f.moments.mean_y},
            {"varX", f.moments.var_x},
            {"varY", f.moments.var_y},
            {"cov", f.moments.cov}}}};
}

nlohmann::json to_json(const EntropyReport& e) {
  return {{"hX", e.hX},       {"hY", e.hY},       {"hJoint", e.hJoint},     {"hW", e.hW},
          {"hXgivenY", e.hXgivenY}, {"hYgivenX", e.hYgivenX}, {"npX", e.npX},   {"npY", e.npY},
          {"npXgY", e.npXgY}, {"npYgX", e.npYgX}, {"npW", e.npW},           {"units", "bits"}};
}

nlohmann::json sourced(nlohmann::json values, const std::string& source, const nlohmann::json& grid) {
  return {{"source", source}, {"grid", grid}, {"values", std::move(values)}};
}

nlohmann::json to_json(const STrajectory& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.records) {
    nlohmann::json row{{"t", r.t}, {"f", r.f}, {"g", r.g}, {"s", r.s}, {"entropy", to_json(r.entropy)}};
    row["moments"] = {{"varX", r.moments.var_x}, {"varY", r.moments.var_y}, {"cov", r.moments.cov}};
    if (r.fisher) {
      row["fisher"] = to_json(*r.fisher);
      row["sqrtFPsi"] = std::sqrt(r.f) * r.fisher->psi.value;
    }
    rows.push_back(std::move(row));
  }
  return {{"gridX", to_json(t.gx)},
          {"gridY", to_json(t.gy)},
          {"tMax", t.params.t_max},
          {"steps", t.params.steps},
          {"scheme", "explicit Euler, f(0) = g(0) = 0"},
          {"richardsonS", t.richardson_s},
          {"richardsonDiff", t.richardson_diff},
          {"records", std::move(rows)}};
}

std::string trajectory_csv(const STrajectory& t) {
  std::string out = "t,f,g,hXgY,hYgX,hW,jXX,jYY,jXY,crossXY,s,psi,sqrtFPsi\n";
  for (const auto& r : t.records) {
    const double nan = std::nan("");
    const double jxx = r.fisher ? r.fisher->jXX : nan;
    const double jyy = r.fisher ? r.fisher->jYY : nan;
    const double jxy = r.fisher ? r.fisher->jXY : nan;
    const double cross = r.fisher ? r.fisher->crossXY : nan;
    const double psi = r.fisher ? r.fisher->psi.value : nan;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(r.t), num(r.f), num(r.g),
                       num(r.entropy.hXgivenY), num(r.entropy.hYgivenX), num(r.entropy.hW), num(jxx), num(jyy),
                       num(jxy), num(cross), num(r.s), num(psi), num(std::sqrt(r.f) * psi));
  }
  return out;
}

std::string checks_table(const std::vector<CheckResult>& checks) {
  std::string out = fmt::format("{:<24} {:>16} {:>16} {:>13} {:>11} {:<13} {}\n", "check", "lhs", "rhs", "slack",
                                "tolerance", "mode", "status");
  for (const auto& c : checks) {
    out += fmt::format("{:<24} {:>16.9g} {:>16.9g} {:>13.4e} {:>11.3e} {:<13} {}\n", c.name, c.lhs, c.rhs, c.slack,
                       c.tolerance, to_string(c.mode), to_string(c.status));
  }
  return out;
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
  std::string out = "name,lhs,rhs,slack,tolerance,mode,status,pass\n";
  for (const auto& c : checks) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", c.name, num(c.lhs), num(c.rhs), num(c.slack), num(c.tolerance),
                       to_string(c.mode), to_string(c.status), c.pass ? "true" : "false");
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::config_invalid, "cannot write " + tmp.string());
    os << content;
    if (!os.flush()) throw Error(ErrorKind::config_invalid, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::config_invalid, "cannot move report into " + path);
  }
}

}  // namespace epilab
