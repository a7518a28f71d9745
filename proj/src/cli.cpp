#include "epilab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include <fmt/core.h>

#include "epilab/gaussian_oracle.hpp"
#include "epilab/inequalities.hpp"
#include "epilab/report.hpp"

namespace epilab {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::config_invalid, msg); }

double number_field(const json& obj, const char* key) {
  if (!obj.at(key).is_number()) invalid(fmt::format("\"{}\" must be a number", key));
  return obj.at(key).get<double>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; })) {
      invalid(fmt::format("unknown key \"{}\" in {}", k, where));
    }
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool wants(const std::vector<std::string>& checks, const std::string& name) {
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

json grid_pair(const Grid1D& gx, const Grid1D& gy) { return {{"x", to_json(gx)}, {"y", to_json(gy)}}; }

json tolerances_json(const Tolerances& t) {
  return {{"inequality", "1e-4*max(|lhs|,|rhs|) + 1e-6"},
          {"equality", "1e-4*max(|lhs|,|rhs|)"},
          {"sMonotoneSlack", t.s_monotone_slack},
          {"sHorizon", t.s_horizon},
          {"psiSlack", t.psi_slack},
          {"lemma3", t.lemma3},
          {"deBruijnRelative", 1e-2},
          {"richardson", kRichardsonTolerance}};
}

json summary_json(const std::vector<CheckResult>& checks) {
  std::map<std::string, int> counts{{"passed", 0}, {"failed", 0}, {"skipped", 0}, {"inconclusive", 0}};
  for (const auto& c : checks) ++counts[to_string(c.status)];
  return counts;
}

struct Prepared {
  BuiltFamily built;
  json header;
};

Prepared prepare(const RunConfig& config, const std::string& command) {
  validate_config(config);
  auto built = build_family(config.family);
  const auto& d = built.density;
  json h;
  h["schemaVersion"] = kSchemaVersion;
  h["command"] = command;
  h["family"] = family_to_json(config.family);
  h["density"] = {{"kind", d.model() ? "analytic-backed" : "tabulated"},
                  {"grid", grid_pair(d.grid_x(), d.grid_y())},
                  {"rawMass", d.raw_mass()}};
  h["warnings"] = built.warnings;
  h["tolerances"] = tolerances_json(config.tolerances);
  return {std::move(built), std::move(h)};
}

std::vector<CheckResult> de_bruijn_spot_checks(const Density2D& d) {
  struct Spot {
    const char* label;
    NoiseCovariance cov;
    double t;
  };
  const Spot spots[] = {{"identity", NoiseCovariance::identity(), 0.5},
                        {"x-only", NoiseCovariance::diagonal(1.0, 0.0), 0.0},
                        {"correlated", NoiseCovariance{1.0, 0.5, 1.0}, 0.25}};
  std::vector<CheckResult> out;
  for (const auto& s : spots) {
    auto r = check_de_bruijn(d, s.cov, s.t);
    r.name = fmt::format("de_bruijn:{}", s.label);
    out.push_back(std::move(r));
  }
  return out;
}

struct FlowOutcome {
  std::optional<STrajectory> trajectory;
  std::vector<CheckResult> checks;
  std::optional<std::string> banner;
};

bool needs_trajectory(const std::vector<std::string>& checks) {
  for (const char* n : {"s_monotone", "s_horizon", "condition1_flow", "psi_flow", "fisher_flow_bound",
                        "moment_accounting", "mixing_sufficient"}) {
    if (wants(checks, n)) return true;
  }
  return false;
}

FlowOutcome run_flow_checks(const RunConfig& config, const Density2D& d, const Evaluation& e,
                            const std::vector<std::string>& checks, bool force_trajectory) {
  FlowOutcome out;
  const bool hypothesis = check_condition1(e).pass;
  if (!hypothesis) out.banner = "hypothesis-failed: Condition 1 fails at t = 0; monotonicity of s is not asserted";
  if (force_trajectory || needs_trajectory(checks)) {
    FlowParams p;
    p.steps = config.flow.steps;
    p.grid_n = config.family.grid ? config.family.grid->n : config.family.grid_n;
    p.richardson = config.flow.richardson;
    p.t_max = config.flow.t_max.value_or(noise_horizon_t_max(d, p.steps, config.flow.horizon_factor));
    out.trajectory = run_cepi_flow(d, p);
  }
  const auto& tr = out.trajectory;
  for (const auto& name : flow_check_names()) {
    if (!wants(checks, name)) continue;
    if (name == "s_monotone") {
      out.checks.push_back(hypothesis ? check_s_monotone(*tr, config.tolerances.s_monotone_slack)
                                      : skipped_check("s_monotone", "hypothesis-failed"));
    } else if (name == "s_horizon") {
      out.checks.push_back(check_s_horizon(*tr, config.flow.horizon_factor, config.tolerances.s_horizon));
    } else if (name == "condition1_flow") {
      out.checks.push_back(check_condition1_flow(*tr));
    } else if (name == "psi_flow") {
      out.checks.push_back(check_psi_flow(*tr, config.tolerances.psi_slack));
    } else if (name == "fisher_flow_bound") {
      out.checks.push_back(check_fisher_flow_bound(*tr));
    } else if (name == "moment_accounting") {
      out.checks.push_back(check_moment_accounting(*tr));
    } else if (name == "de_bruijn") {
      for (auto& c : de_bruijn_spot_checks(d)) out.checks.push_back(std::move(c));
    } else if (name == "gap_derivative") {
      out.checks.push_back(entropy_gap_derivative(d, NoiseCovariance::identity()));
    } else if (name == "mixing_sufficient") {
      out.checks.push_back(check_mixing_sufficient(*tr));
    }
  }
  return out;
}

std::vector<CheckResult> static_checks(const RunConfig& config, const Evaluation& e,
                                       const std::vector<std::string>& checks) {
  std::vector<CheckResult> out;
  for (const auto& name : static_check_names()) {
    if (!wants(checks, name)) continue;
    if (name == "epi") out.push_back(check_epi(e));
    else if (name == "stam") out.push_back(check_stam(e.analysis.joint));
    else if (name == "prop4") out.push_back(check_prop4(e));
    else if (name == "condition1") out.push_back(check_condition1(e));
    else if (name == "takano") out.push_back(check_condition_takano(e));
    else if (name == "cepi") out.push_back(check_cepi(e));
    else if (name == "m_identity") out.push_back(m_identity_check(e.analysis));
    else if (name == "lemma3") out.push_back(check_score_of_sum(e.analysis, config.tolerances.lemma3));
    else if (name == "mixing_threshold") out.push_back(check_mixing_threshold(e));
  }
  return out;
}

void attach_reports(json& report, const Density2D& d, const Evaluation& e) {
  const json grid = grid_pair(d.grid_x(), d.grid_y());
  report["fisher"] = sourced(to_json(e.fisher), "quadrature", grid);
  report["entropy"] = sourced(to_json(e.entropy), "quadrature", grid);
  report["truncation"] = {{"rawMass", d.raw_mass()},
                          {"maskMass", e.fisher.maskMass},
                          {"massDeviation", e.fisher.massDeviation}};
  if (const auto g = d.single_gaussian()) {
    const auto spec = to_spec(*g);
    report["oracle"] = {{"fisher", sourced(to_json(oracle_fisher(spec)), "oracle", nullptr)},
                        {"entropy", sourced(to_json(oracle_entropy(spec)), "oracle", nullptr)}};
  }
}

void finish(RunResult& r) {
  r.exit_code = exit_code_for(r.checks);
  json arr = json::array();
  for (const auto& c : r.checks) arr.push_back(to_json(c));
  r.report["checks"] = std::move(arr);
  r.report["summary"] = summary_json(r.checks);
  r.report["exitCode"] = r.exit_code;
}

}  // namespace

const std::vector<std::string>& static_check_names() {
  static const std::vector<std::string> names{"epi",    "stam",       "prop4",  "condition1",      "takano",
                                              "cepi",   "m_identity", "lemma3", "mixing_threshold"};
  return names;
}

const std::vector<std::string>& flow_check_names() {
  static const std::vector<std::string> names{"s_monotone",        "s_horizon",  "condition1_flow",
                                              "psi_flow",          "fisher_flow_bound", "moment_accounting",
                                              "de_bruijn",         "gap_derivative",    "mixing_sufficient"};
  return names;
}

std::vector<std::string> expand_checks(const std::vector<std::string>& requested) {
  std::set<std::string> chosen;
  for (const auto& name : requested) {
    if (name == "all" || name == "all-flow") {
      chosen.insert(static_check_names().begin(), static_check_names().end());
      if (name == "all-flow") chosen.insert(flow_check_names().begin(), flow_check_names().end());
    } else if (wants(static_check_names(), name) || wants(flow_check_names(), name)) {
      chosen.insert(name);
    } else {
      invalid("unknown check '" + name + "'");
    }
  }
  if (chosen.empty()) invalid("no checks requested");
  // Registry order, independent of how the list was written.
  std::vector<std::string> out;
  for (const auto* list : {&static_check_names(), &flow_check_names()}) {
    for (const auto& n : *list) {
      if (chosen.contains(n)) out.push_back(n);
    }
  }
  return out;
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) invalid("config must be a JSON object");
  reject_unknown(doc, {"family", "checks", "flow", "output", "tolerances"}, "config");
  RunConfig c;
  if (doc.contains("family")) {
    if (doc["family"].is_string()) c.family = FamilySpec{doc["family"].get<std::string>(), {}, std::nullopt,
                                                         kDefaultGridPoints, {}};
    else c.family = family_from_json(doc["family"]);
  }
  if (doc.contains("checks")) {
    const auto& ch = doc["checks"];
    if (ch.is_string()) {
      c.checks = split_list(ch.get<std::string>());
    } else if (ch.is_array()) {
      c.checks.clear();
      for (const auto& v : ch) {
        if (!v.is_string()) invalid("check names must be strings");
        c.checks.push_back(v.get<std::string>());
      }
    } else {
      invalid("\"checks\" must be a list or a comma-separated string");
    }
  }
  if (doc.contains("flow")) {
    const auto& f = doc["flow"];
    if (!f.is_object()) invalid("\"flow\" must be an object");
    reject_unknown(f, {"tMax", "steps", "horizonFactor", "richardson"}, "flow");
    if (f.contains("tMax")) c.flow.t_max = number_field(f, "tMax");
    if (f.contains("steps")) {
      if (!f["steps"].is_number_integer()) invalid("\"steps\" must be an integer");
      c.flow.steps = f["steps"].get<int>();
    }
    if (f.contains("horizonFactor")) c.flow.horizon_factor = number_field(f, "horizonFactor");
    if (f.contains("richardson")) {
      if (!f["richardson"].is_boolean()) invalid("\"richardson\" must be a boolean");
      c.flow.richardson = f["richardson"].get<bool>();
    }
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    if (!o.is_object()) invalid("\"output\" must be an object");
    reject_unknown(o, {"format", "path"}, "output");
    if (o.contains("format")) c.output.format = o["format"].get<std::string>();
    if (o.contains("path")) c.output.path = o["path"].get<std::string>();
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    if (!t.is_object()) invalid("\"tolerances\" must be an object");
    reject_unknown(t, {"sMonotoneSlack", "sHorizon", "psiSlack", "lemma3"}, "tolerances");
    if (t.contains("sMonotoneSlack")) c.tolerances.s_monotone_slack = number_field(t, "sMonotoneSlack");
    if (t.contains("sHorizon")) c.tolerances.s_horizon = number_field(t, "sHorizon");
    if (t.contains("psiSlack")) c.tolerances.psi_slack = number_field(t, "psiSlack");
    if (t.contains("lemma3")) c.tolerances.lemma3 = number_field(t, "lemma3");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) invalid("cannot open config " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    invalid("config " + path + " is not valid JSON: " + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const json::exception& e) {
    invalid(std::string("config has a field of the wrong type: ") + e.what());
  }
}

void validate_config(const RunConfig& c) {
  if (!canonical_family(c.family.name)) invalid("unknown family '" + c.family.name + "'");
  expand_checks(c.checks);
  if (c.output.format != "json" && c.output.format != "csv" && c.output.format != "table") {
    invalid("format must be json, csv or table");
  }
  if (c.flow.steps < 8) invalid("flow steps must be at least 8");
  if (c.flow.t_max && !(*c.flow.t_max > 0.0)) invalid("t_max must be positive");
  if (!(c.flow.horizon_factor > 0.0)) invalid("horizon factor must be positive");
  for (double v : {c.tolerances.s_monotone_slack, c.tolerances.s_horizon, c.tolerances.psi_slack,
                   c.tolerances.lemma3}) {
    if (!(v >= 0.0) || !std::isfinite(v)) invalid("tolerances must be finite and nonnegative");
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config_invalid:
    case ErrorKind::invalid_parameters:
      return 2;
    default:
      return 3;
  }
}

int exit_code_for(const std::vector<CheckResult>& checks) {
  return std::any_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::failed; })
             ? 1
             : 0;
}

RunResult cmd_verify(const RunConfig& config) {
  auto [built, header] = prepare(config, "verify");
  const auto& d = built.density;
  const auto checks = expand_checks(config.checks);
  const auto e = evaluate(d);
  RunResult r;
  r.report = std::move(header);
  attach_reports(r.report, d, e);
  r.checks = static_checks(config, e, checks);
  auto flow = run_flow_checks(config, d, e, checks, false);
  for (auto& c : flow.checks) r.checks.push_back(std::move(c));
  if (flow.trajectory) r.report["trajectory"] = to_json(*flow.trajectory);
  r.trajectory = std::move(flow.trajectory);
  finish(r);
  return r;
}

RunResult cmd_flow(const RunConfig& config) {
  auto [built, header] = prepare(config, "flow");
  const auto& d = built.density;
  auto checks = expand_checks(config.checks);
  std::erase_if(checks, [](const auto& n) { return !wants(flow_check_names(), n); });
  if (checks.empty()) checks = flow_check_names();
  const auto e = evaluate(d);
  RunResult r;
  r.report = std::move(header);
  attach_reports(r.report, d, e);
  auto flow = run_flow_checks(config, d, e, checks, true);
  r.checks = std::move(flow.checks);
  if (flow.banner) r.report["banner"] = *flow.banner;
  r.report["trajectory"] = to_json(*flow.trajectory);
  r.trajectory = std::move(flow.trajectory);
  finish(r);
  return r;
}

std::string cmd_list_families(bool as_json) {
  if (as_json) {
    json arr = json::array();
    for (const auto& f : family_registry()) {
      json params = json::array();
      for (const auto& p : f.params) {
        params.push_back({{"name", p.name}, {"default", p.default_value}, {"description", p.description}});
      }
      arr.push_back({{"name", f.name}, {"aliases", f.aliases}, {"description", f.description}, {"params", params}});
    }
    return json{{"schemaVersion", kSchemaVersion}, {"families", arr}}.dump(2) + "\n";
  }
  std::string out;
  for (const auto& f : family_registry()) {
    out += f.name;
    if (!f.aliases.empty()) {
      out += " (";
      for (std::size_t i = 0; i < f.aliases.size(); ++i) out += (i ? ", " : "") + f.aliases[i];
      out += ")";
    }
    out += "\n  " + f.description + "\n";
    for (const auto& p : f.params) out += fmt::format("    {:<6} default {:<8} {}\n", p.name, p.default_value, p.description);
  }
  return out;
}

std::string render(const RunResult& result, const RunConfig& config, const std::string& command) {
  const auto& fmt_name = config.output.format;
  if (fmt_name == "json") return result.report.dump(2) + "\n";
  if (fmt_name == "csv") {
    if (command == "flow" && result.trajectory) return trajectory_csv(*result.trajectory);
    return checks_csv(result.checks);
  }
  std::string out;
  if (result.report.contains("banner")) out += result.report["banner"].get<std::string>() + "\n";
  out += checks_table(result.checks);
  return out;
}

int run_command(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    RunResult r;
    if (command == "verify") r = cmd_verify(config);
    else if (command == "flow") r = cmd_flow(config);
    else invalid("unknown command '" + command + "'");
    const auto text = render(r, config, command);
    if (config.output.path.empty()) out << text;
    else write_atomic(config.output.path, text);
    return r.exit_code;
  } catch (const Error& e) {
    err << "epi-lab: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "epi-lab: config-invalid: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace epilab
