#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "epilab/check_result.hpp"
#include "epilab/entropy.hpp"
#include "epilab/flow.hpp"
#include "epilab/grid.hpp"
#include "epilab/score.hpp"

namespace epilab {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const Grid1D& grid);
nlohmann::json to_json(const CheckResult& check);
nlohmann::json to_json(const FisherReport& report);
nlohmann::json to_json(const EntropyReport& report);
nlohmann::json to_json(const STrajectory& trajectory);

/// Wraps a scalar block with its provenance.
nlohmann::json sourced(nlohmann::json values, const std::string& source, const nlohmann::json& grid);

/// Columns t, f, g, hXgY, hYgX, hW, jXX, jYY, jXY, crossXY, s, psi, sqrtFPsi.
std::string trajectory_csv(const STrajectory& trajectory);

std::string checks_table(const std::vector<CheckResult>& checks);
std::string checks_csv(const std::vector<CheckResult>& checks);

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace epilab
