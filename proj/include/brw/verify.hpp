#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brw/stats.hpp"

namespace brw {

// Acceptance suites. Every tolerance and sample size is a named constant
// here so reports and tests quote the same numbers.
namespace tol {
inline constexpr double kFieldExact = 1e-9;        // pmf oracle vs linear fields
inline constexpr double kKppAgreement = 1e-12;     // kpp vs pgf hitting recursion
inline constexpr double kSecondMoment = 1e-8;
inline constexpr double kSeBand = 3.0;             // "within 3 SE"
inline constexpr double kSizeBiasZ = 4.0;
inline constexpr double kKsDistance = 0.05;
inline constexpr double kKappaSum = 0.02;
inline constexpr double kKappaStability = 0.05;
inline constexpr double kTightnessRatio = 1.5;
inline constexpr double kScalingFactor = 2.0;
inline constexpr double kChiSquareP = 0.01;
inline constexpr double kGammaGrowth = 0.01;
inline constexpr double kMonotoneSlack = 1e-12;
inline constexpr double kKolmogorovLo = 1.85;
inline constexpr double kKolmogorovHi = 2.0;
inline constexpr double kBallQ90Lo = 0.02;
inline constexpr double kBallQ90Hi = 2.0;
}  // namespace tol

/// Clamp constant for the three-dimensional second-moment identity; the
/// dropped mass is reported alongside.
inline constexpr double kIdentityClampC3 = 1.6;

/// 4 e^15, the constant of the super-solution check.
double super_kappa();

struct VerifyOptions {
  std::uint64_t seed = 0;
  double budget_seconds = 0.0;  // 0 = unlimited
  /// Multiplies every Monte Carlo sample size (1 = acceptance sizes).
  double scale = 1.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  bool skipped = false;      // not run because the budget ran out
  std::string detail;        // one-line summary of the decisive numbers
  std::vector<ReportRow> rows;
  double seconds = 0.0;      // wall time; kept out of reports
};

/// Number of acceptance criteria.
inline constexpr int kCriterionCount = 14;

const char* criterion_name(int id);

/// Criterion ids of a named suite: all, fundamental, exact, simulation,
/// spine, conditioned, or a single id such as "7".
std::vector<int> suite_criteria(const std::string& suite);

CriterionResult run_criterion(int id, const VerifyOptions& opts);

struct SuiteResult {
  std::vector<CriterionResult> results;
  bool budget_exceeded = false;
  bool all_pass() const;
};

/// Runs the criteria in order; `on_result` sees each result as it finishes.
SuiteResult run_suite(const std::vector<int>& ids, const VerifyOptions& opts,
                      const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace brw
