#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epilab/density.hpp"

namespace epilab {

inline constexpr std::size_t kDefaultGridPoints = 512;
/// Default box half-width in marginal standard deviations.
inline constexpr double kDefaultBoxSds = 8.0;

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = kDefaultGridPoints;
};

struct FamilySpec {
  std::string name;
  std::map<std::string, double> params;
  /// Explicit box shared by both axes; the family default when absent.
  std::optional<GridSpec> grid;
  /// Point count for the default box.
  std::size_t grid_n = kDefaultGridPoints;
  /// custom-tabulated: CSV of (x, y, p) triples.
  std::string source;
};

struct ParamInfo {
  std::string name;
  double default_value;
  std::string description;
};

struct FamilyInfo {
  std::string name;
  std::vector<std::string> aliases;
  std::string description;
  std::vector<ParamInfo> params;
};

const std::vector<FamilyInfo>& family_registry();

/// Canonical family name for `name` or an alias; nullopt if unknown.
std::optional<std::string> canonical_family(const std::string& name);

struct BuiltFamily {
  Density2D density;
  std::vector<std::string> warnings;
};

BuiltFamily build_family(const FamilySpec& spec);
Density2D build_density(const FamilySpec& spec);

/// Parses {"name": ..., "params": {...}, "grid": {"lo","hi","n"}, "source": ...}.
FamilySpec family_from_json(const nlohmann::json& doc);
nlohmann::json family_to_json(const FamilySpec& spec);

/// Reads (x, y, p) triples on a uniform grid; a non-numeric first line is
/// treated as a header.
BuiltFamily load_tabulated_csv(const std::string& path);

}  // namespace epilab
