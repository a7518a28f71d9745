#include "epilab/check_result.hpp"

#include <algorithm>
#include <cmath>

namespace epilab {

double inequality_tolerance(double lhs, double rhs) {
  return 1e-4 * std::max(std::abs(lhs), std::abs(rhs)) + 1e-6;
}

double equality_tolerance(double lhs, double rhs) { return 1e-4 * std::max(std::abs(lhs), std::abs(rhs)); }

CheckResult make_check(std::string name, double lhs, double rhs, double tolerance, CheckMode mode) {
  CheckResult r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.tolerance = tolerance;
  r.mode = mode;
  if (!std::isfinite(r.slack)) {
    r.pass = false;
  } else if (mode == CheckMode::inequality) {
    r.pass = r.slack >= -tolerance;
  } else {
    r.pass = std::abs(r.slack) <= tolerance;
  }
  r.status = r.pass ? CheckStatus::passed : CheckStatus::failed;
  return r;
}

CheckResult skipped_check(std::string name, std::string reason) {
  CheckResult r;
  r.name = std::move(name);
  r.lhs = r.rhs = r.slack = std::nan("");
  r.pass = false;
  r.status = CheckStatus::skipped;
  r.notes["skipReason"] = std::move(reason);
  return r;
}

std::string to_string(CheckMode mode) {
  return mode == CheckMode::inequality ? "inequality" : "equality-case";
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::passed: return "passed";
    case CheckStatus::failed: return "failed";
    case CheckStatus::skipped: return "skipped";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

}  // namespace epilab
