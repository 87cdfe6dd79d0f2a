// Acceptance runner: one PASS/FAIL line per criterion, failing checks listed below it.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "kpi/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"KP-I lab acceptance criteria"};
  std::vector<int> ids;
  bool verbose = false;
  std::string out;
  app.add_option("--criterion", ids, "criterion numbers (default: all)")->check(CLI::Range(1, 15));
  app.add_flag("-v,--verbose", verbose, "print every check, not only failing ones");
  app.add_option("--json", out, "also write the JSON report here");
  CLI11_PARSE(app, argc, argv);
  if (ids.empty()) ids = kpi::suites().at("all");

  std::vector<kpi::CriterionResult> results;
  bool all = true;
  for (int id : ids) {
    const kpi::CriterionResult r = kpi::run_criterion(id);
    std::printf("%s  criterion %2d  %-38s %8.2f s\n", r.pass() ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
    if (!r.error.empty()) std::printf("      error: %s\n", r.error.c_str());
    for (const auto& c : r.checks) {
      if (c.pass && !verbose) continue;
      std::printf("      [%s] %s: measured %.10g, predicted %.10g, tolerance %.3g (%s)%s%s\n", c.pass ? "ok" : "FAIL",
                  c.name.c_str(), c.measured, c.predicted, c.tolerance, c.comparison.c_str(), c.note.empty() ? "" : "; ",
                  c.note.c_str());
    }
    std::fflush(stdout);
    all = all && r.pass();
    results.push_back(r);
  }
  if (!out.empty()) {
    std::ofstream os(out);
    os << kpi::to_json(results, "acceptance", true).dump(2) << "\n";
  }
  return all ? 0 : 1;
}
