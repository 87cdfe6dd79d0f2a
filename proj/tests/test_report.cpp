#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "kpi/field_io.hpp"
#include "kpi/verify.hpp"

using namespace kpi;

TEST(Report, SchemaAndDeterminism) {
  const Grid g = make_grid(256, 80.0, 8);
  const json a = to_json(action(zaitsev(0.1, g), speed(0.1)));
  const json b = to_json(action(zaitsev(0.1, g), speed(0.1)));
  EXPECT_EQ(a["schema"], report_schema);
  EXPECT_EQ(a["kind"], "functionals");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Report, NonFiniteNumbersBecomeNull) {
  EXPECT_TRUE(number(std::nan("")).is_null());
  EXPECT_TRUE(number(INFINITY).is_null());
  EXPECT_EQ(number(1.5).get<double>(), 1.5);
}

TEST(Report, CheckComparisons) {
  EXPECT_TRUE(check::abs_below("x", -1e-9, 1e-8).pass);
  EXPECT_FALSE(check::abs_below("x", 2e-8, 1e-8).pass);
  EXPECT_TRUE(check::rel_within("x", 100.0, 100.05, 1e-3).pass);
  EXPECT_FALSE(check::rel_within("x", 100.0, 100.2, 1e-3).pass);
  EXPECT_TRUE(check::greater("x", 1.0, 0.0).pass);
  EXPECT_FALSE(check::less("x", 1.0, 0.0).pass);
  EXPECT_TRUE(check::equal("x", 3, 3).pass);
}

TEST(Report, VerifyReportShape) {
  const CriterionResult r = run_criterion(4);
  EXPECT_TRUE(r.pass());
  const json j = to_json(std::vector<CriterionResult>{r}, "lemma21", false);
  EXPECT_EQ(j["schema"], report_schema);
  EXPECT_TRUE(j["pass"].get<bool>());
  const json& c = j["criteria"]["4"];
  for (const auto& [name, chk] : c["checks"].items()) {
    EXPECT_TRUE(chk.contains("predicted")) << name;
    EXPECT_TRUE(chk.contains("measured")) << name;
    EXPECT_TRUE(chk.contains("tolerance")) << name;
    EXPECT_TRUE(chk.contains("pass")) << name;
  }
  EXPECT_THROW(run_criterion(16), std::out_of_range);
}

TEST(Report, SuitesCoverEveryCriterion) {
  std::set<int> seen;
  for (const auto& [name, ids] : suites()) {
    if (name == "all") continue;
    seen.insert(ids.begin(), ids.end());
  }
  EXPECT_EQ(seen.size(), 15u);
  EXPECT_EQ(suites().at("all").size(), 15u);
}

TEST(FieldIo, RoundTrips) {
  const Grid g = make_grid(64, 20.0, 8);
  const Field f = zaitsev(0.2, g);
  const std::string bin = testing::TempDir() + "kpi_field.bin";
  const std::string csv = testing::TempDir() + "kpi_field.csv";
  save_field(bin, f);
  save_field(csv, f);
  const Field fb = load_field(bin);
  const Field fc = load_field(csv);
  EXPECT_EQ(fb.grid, g);
  EXPECT_EQ(fb.values, f.values);
  EXPECT_EQ(fc.grid.nx, g.nx);
  EXPECT_EQ(fc.grid.ny, g.ny);
  EXPECT_NEAR(fc.grid.lx, g.lx, 1e-12);
  ASSERT_EQ(fc.values.size(), f.values.size());
  for (std::size_t k = 0; k < f.values.size(); ++k) EXPECT_NEAR(fc.values[k], f.values[k], 1e-12);
  std::remove(bin.c_str());
  std::remove(csv.c_str());
}
