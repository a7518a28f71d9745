#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "epilab/error.hpp"
#include "epilab/family.hpp"
#include "epilab/quadrature.hpp"

using namespace epilab;

TEST(Family, RegistryListsFourFamiliesWithAliases) {
  std::vector<std::string> names;
  for (const auto& f : family_registry()) names.push_back(f.name);
  EXPECT_EQ(names, (std::vector<std::string>{"bivariate-gaussian", "gaussian-mixture", "quartic-fkg",
                                             "custom-tabulated"}));
  EXPECT_EQ(canonical_family("gaussian"), "bivariate-gaussian");
  EXPECT_EQ(canonical_family("quartic"), "quartic-fkg");
  EXPECT_FALSE(canonical_family("cauchy"));
}

TEST(Family, GaussianDefaultBoxCapturesMass) {
  const auto d = build_density({"gaussian", {{"r", 0.8}, {"vx", 2.0}}, std::nullopt, 512, {}});
  EXPECT_EQ(d.grid_x().size(), 512u);
  EXPECT_NEAR(d.raw_mass(), 1.0, 1e-10);
  EXPECT_TRUE(d.single_gaussian());
}

TEST(Family, InvalidParametersThrow) {
  EXPECT_THROW(build_density({"gaussian", {{"r", 1.0}}, std::nullopt, 512, {}}), Error);
  EXPECT_THROW(build_density({"gaussian", {{"rho", 0.1}}, std::nullopt, 512, {}}), Error);
  EXPECT_THROW(build_density({"quartic", {{"b", 9.0}}, std::nullopt, 512, {}}), Error);
  EXPECT_THROW(build_density({"nope", {}, std::nullopt, 512, {}}), Error);
}

TEST(Family, TooSmallBoxIsReported) {
  try {
    build_density({"gaussian", {}, GridSpec{-2.0, 2.0, 128}, 128, {}});
    FAIL() << "expected grid-too-small";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::grid_too_small);
  }
}

TEST(Family, QuarticIsSymmetric) {
  const auto d = build_density({"quartic-fkg", {{"b", 0.5}}, std::nullopt, 256, {}});
  const auto& v = d.values();
  EXPECT_NEAR((v - v.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-14 * v.maxCoeff());
}

TEST(Family, JsonRoundTrip) {
  const auto doc = nlohmann::json::parse(R"({"name":"mixture","params":{"w":0.3},"grid":{"n":128}})");
  const auto spec = family_from_json(doc);
  EXPECT_EQ(spec.grid_n, 128u);
  EXPECT_DOUBLE_EQ(spec.params.at("w"), 0.3);
  EXPECT_EQ(family_to_json(spec)["name"], "gaussian-mixture");
  EXPECT_THROW(family_from_json(nlohmann::json::parse(R"({"params":{}})")), Error);
  EXPECT_THROW(family_from_json(nlohmann::json::parse(R"({"name":"gaussian","params":{"r":"x"}})")), Error);
}

TEST(Family, TabulatedCsvRenormalizesWithWarning) {
  const auto path = std::filesystem::temp_directory_path() / "epilab_family_test.csv";
  {
    std::ofstream os(path);
    os.precision(17);
    os << "x,y,p\n";
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = -6.0 + 12.0 * i / (n - 1), y = -6.0 + 12.0 * j / (n - 1);
        os << x << "," << y << "," << 3.0 * std::exp(-0.5 * (x * x + y * y)) / (2.0 * std::numbers::pi) << "\n";
      }
    }
  }
  FamilySpec spec{"custom-tabulated", {}, std::nullopt, 512, path.string()};
  const auto built = build_family(spec);
  EXPECT_FALSE(built.warnings.empty());
  EXPECT_EQ(built.density.grid_x().size(), 64u);
  EXPECT_NEAR(built.density.raw_mass(), 3.0, 1e-3);
  EXPECT_NEAR(quadrature_2d(built.density.values(), built.density.grid_x(), built.density.grid_y()), 1.0, 1e-12);
  std::filesystem::remove(path);
}

TEST(Family, TabulatedCsvNeedsUniformGrid) {
  const auto path = std::filesystem::temp_directory_path() / "epilab_family_bad.csv";
  {
    std::ofstream os(path);
    // x skips from 14 to 16.
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) os << (i < 15 ? i : 16) << " " << j << " 1\n";
  }
  EXPECT_THROW(load_tabulated_csv(path.string()), Error);
  std::filesystem::remove(path);
}
