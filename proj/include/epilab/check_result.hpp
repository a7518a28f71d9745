#pragma once

#include <map>
#include <string>

namespace epilab {

enum class CheckMode { inequality, equality_case };

/// `inconclusive` marks a sufficient condition that does not hold where the
/// conclusion it guards still holds; it never counts as a failure.
enum class CheckStatus { passed, failed, skipped, inconclusive };

struct CheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  double tolerance = 0.0;
  CheckMode mode = CheckMode::inequality;
  CheckStatus status = CheckStatus::failed;
  std::string source = "quadrature";
  std::map<std::string, double> diagnostics;
  std::map<std::string, std::string> notes;
};

/// 1e-4·max(|lhs|, |rhs|) + 1e-6.
double inequality_tolerance(double lhs, double rhs);
/// 1e-4·max(|lhs|, |rhs|).
double equality_tolerance(double lhs, double rhs);

/// slack = lhs - rhs; pass ⇔ slack ≥ -tol (inequality) or |slack| ≤ tol.
CheckResult make_check(std::string name, double lhs, double rhs, double tolerance, CheckMode mode);
CheckResult skipped_check(std::string name, std::string reason);

std::string to_string(CheckMode mode);
std::string to_string(CheckStatus status);

}  // namespace epilab
