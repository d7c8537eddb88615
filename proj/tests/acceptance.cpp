// Runs every acceptance criterion at full sample sizes and prints one line
// per criterion. Exit status is zero only if all of them pass.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

#include "brw/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::uint64_t seed = 0;
  std::string suite = "all";
  double budget = 0.0;
  app.add_option("--seed", seed, "master seed")->required();
  app.add_option("--suite", suite, "suite name or id list");
  app.add_option("--budget", budget, "wall-clock budget in seconds");
  CLI11_PARSE(app, argc, argv);

  brw::VerifyOptions opts;
  opts.seed = seed;
  opts.budget_seconds = budget;
  const auto res = brw::run_suite(brw::suite_criteria(suite), opts, [](const brw::CriterionResult& r) {
    std::cout << (r.skipped ? "[SKIP] " : r.pass ? "[PASS] " : "[FAIL] ") << 'C' << r.id << ' '
              << r.name << ": " << r.detail << "  (" << std::fixed << std::setprecision(1)
              << r.seconds << " s)" << std::defaultfloat << std::endl;
  });
  int passed = 0;
  for (const auto& r : res.results) passed += r.pass && !r.skipped;
  std::cout << passed << '/' << res.results.size() << " criteria passed" << std::endl;
  return res.all_pass() && !res.budget_exceeded ? 0 : 1;
}
