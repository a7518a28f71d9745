#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epilab/check_result.hpp"
#include "epilab/error.hpp"
#include "epilab/family.hpp"
#include "epilab/flow.hpp"

namespace epilab {

struct FlowConfig {
  /// Chosen from the noise horizon when absent.
  std::optional<double> t_max;
  int steps = 32;
  double horizon_factor = 100.0;
  bool richardson = true;
};

struct OutputConfig {
  std::string format = "json";  // json | csv | table
  std::string path;             // stdout when empty
};

struct Tolerances {
  double s_monotone_slack = 1e-4;
  double s_horizon = 0.02;
  double psi_slack = 1e-6;
  double lemma3 = 1e-3;
};

struct RunConfig {
  FamilySpec family{"bivariate-gaussian", {}, std::nullopt, kDefaultGridPoints, {}};
  std::vector<std::string> checks{"all"};
  FlowConfig flow;
  OutputConfig output;
  Tolerances tolerances;
};

/// Checks evaluated at t = 0.
const std::vector<std::string>& static_check_names();
/// Checks that need a flow trajectory or noise perturbations.
const std::vector<std::string>& flow_check_names();

/// Expands "all" and "all-flow" and rejects unknown names (config-invalid).
std::vector<std::string> expand_checks(const std::vector<std::string>& requested);

RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// Throws config-invalid for inconsistent settings.
void validate_config(const RunConfig& config);

struct RunResult {
  int exit_code = 0;
  nlohmann::json report;
  std::vector<CheckResult> checks;
  std::optional<STrajectory> trajectory;
};

/// 1 for a failed check, 2 for configuration problems, 3 for numerical failures.
int exit_code_for(ErrorKind kind);
int exit_code_for(const std::vector<CheckResult>& checks);

RunResult cmd_verify(const RunConfig& config);
RunResult cmd_flow(const RunConfig& config);
std::string cmd_list_families(bool as_json);

/// Report text in the configured format.
std::string render(const RunResult& result, const RunConfig& config, const std::string& command);

/// Runs a command end to end: writes the report (or an error document) and
/// returns the process exit status.
int run_command(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace epilab
