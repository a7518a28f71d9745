#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epilab/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::string family;
  std::optional<double> r;
  std::optional<double> b;
  std::vector<std::string> params;
  std::optional<std::size_t> grid_n;
  std::optional<double> box;
  std::optional<double> t_max;
  std::optional<int> steps;
  std::string checks;
  std::string output;
  std::string format;
};

void add_run_options(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--family", f.family, "family name or alias");
  cmd->add_option("--r", f.r, "correlation (bivariate-gaussian, gaussian-mixture)");
  cmd->add_option("--b", f.b, "coupling (quartic-fkg)");
  cmd->add_option("--param", f.params, "family parameter as name=value (repeatable)");
  cmd->add_option("--grid-n", f.grid_n, "grid points per axis")->check(CLI::Range(16, 1 << 14));
  cmd->add_option("--box", f.box, "box half-width; the box is [-box, box] on both axes")->check(CLI::PositiveNumber);
  cmd->add_option("--t-max", f.t_max, "flow horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--steps", f.steps, "Euler steps")->check(CLI::Range(8, 1 << 16));
  cmd->add_option("--checks", f.checks, "comma-separated checks, all or all-flow");
  cmd->add_option("--output", f.output, "report path (stdout when omitted)");
  cmd->add_option("--format", f.format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
}

epilab::RunConfig merge(const Flags& f) {
  epilab::RunConfig c = f.config.empty() ? epilab::RunConfig{} : epilab::load_config(f.config);
  if (!f.family.empty() && f.family != c.family.name) {
    c.family.name = f.family;
    c.family.params.clear();
  }
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw epilab::Error(epilab::ErrorKind::config_invalid, "--param expects name=value, got '" + kv + "'");
    }
    try {
      std::size_t used = 0;
      const std::string value = kv.substr(eq + 1);
      c.family.params[kv.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw epilab::Error(epilab::ErrorKind::config_invalid, "--param value is not a number in '" + kv + "'");
    }
  }
  if (f.r) c.family.params["r"] = *f.r;
  if (f.b) c.family.params["b"] = *f.b;
  if (f.grid_n) {
    if (c.family.grid) c.family.grid->n = *f.grid_n;
    c.family.grid_n = *f.grid_n;
  }
  if (f.box) c.family.grid = epilab::GridSpec{-*f.box, *f.box, c.family.grid ? c.family.grid->n : c.family.grid_n};
  if (f.t_max) c.flow.t_max = *f.t_max;
  if (f.steps) c.flow.steps = *f.steps;
  if (!f.checks.empty()) {
    c.checks.clear();
    std::string s = f.checks;
    for (std::size_t pos; (pos = s.find(',')) != std::string::npos; s.erase(0, pos + 1)) {
      if (pos > 0) c.checks.push_back(s.substr(0, pos));
    }
    if (!s.empty()) c.checks.push_back(s);
  }
  if (!f.output.empty()) c.output.path = f.output;
  if (!f.format.empty()) c.output.format = f.format;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of entropy power and Fisher information inequalities"};
  app.require_subcommand(1);
  Flags verify_flags, flow_flags;
  bool list_json = false;
  auto* verify = app.add_subcommand("verify", "run inequality checks on one family instance");
  add_run_options(verify, verify_flags);
  auto* flow = app.add_subcommand("flow", "run the coupled noise flow and its checks");
  add_run_options(flow, flow_flags);
  auto* list = app.add_subcommand("list-families", "print registered families and their parameters");
  list->add_flag("--json", list_json, "machine-readable schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    std::cout << epilab::cmd_list_families(list_json);
    return 0;
  }
  const bool is_verify = verify->parsed();
  try {
    const auto config = merge(is_verify ? verify_flags : flow_flags);
    return epilab::run_command(is_verify ? "verify" : "flow", config, std::cout, std::cerr);
  } catch (const epilab::Error& e) {
    std::cerr << "epi-lab: " << e.what() << "\n";
    return epilab::exit_code_for(e.kind());
  }
}
