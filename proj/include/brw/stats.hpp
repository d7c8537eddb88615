#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brw/forward_sim.hpp"

namespace brw {

/// Monte Carlo estimate: mean, standard error of the mean, sample size.
struct EstimateCI {
  double mean = 0.0;
  double std_error = 0.0;
  double sd = 0.0;
  std::int64_t reps = 0;
  std::optional<double> q10, q50, q90;

  double lower(double z = 1.96) const { return mean - z * std_error; }
  double upper(double z = 1.96) const { return mean + z * std_error; }
};

EstimateCI estimate(std::span<const double> samples, bool with_quantiles = false);
inline EstimateCI estimate(const std::vector<double>& samples, bool with_quantiles = false) {
  return estimate(std::span<const double>(samples), with_quantiles);
}

/// Linear-interpolation sample quantile (Hyndman-Fan type 7).
double quantile(std::vector<double> samples, double q);

/// Pearson correlation of two equally long samples.
double correlation(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Goodness of fit

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double D = 0.0;
  double p_value = 0.0;
  bool pass = false;  // p_value > level
};

/// One-sample KS distance to the exponential law with mean `mu`.
KsResult ks_against_exponential(std::span<const double> samples, double mu, double level = 0.01);

struct ChiSquareResult {
  double stat = 0.0;
  int dof = 0;
  double p_value = 0.0;
  int bins = 0;
};

/// Pearson test of observed category counts against exact probabilities.
/// Adjacent categories are pooled until every expected count is >= min_expected;
/// probability mass missing from `probs` forms a final residual category.
ChiSquareResult chi_square(std::span<const std::int64_t> observed, std::span<const double> probs,
                           double min_expected = 5.0);

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// ---------------------------------------------------------------------------
// Reports

struct ReportRow {
  std::string tag;        // criterion label
  int n = 0;
  int d = 0;
  std::string offspring;
  std::string statistic;
  double value = 0.0;
  std::string band;       // human-readable tolerance
  bool pass = false;
};

void write_report_header(std::ostream& os);
void write_report_row(std::ostream& os, const ReportRow& row);
std::vector<ReportRow> read_report_csv(std::istream& is);

struct TightnessResult {
  std::vector<ReportRow> rows;  // one per n, then a summary row
  double ratio = 0.0;           // max/min of q90 across the grid
  bool pass = false;
};

/// q90 of stat/f(n) at every n of the grid; passes when max/min <= ratio_bound.
TightnessResult tightness_table(const std::map<int, std::vector<double>>& stat_by_n,
                                const std::function<double(int)>& normalizer, double ratio_bound,
                                const std::string& tag, int d, const std::string& offspring,
                                const std::string& statistic);

struct KappaRow {
  int n = 0;
  std::vector<EstimateCI> kappa;  // index j = 1..j_max (0 unused)
  EstimateCI overflow_fraction;   // overflow mass / Z
  EstimateCI m1_ratio;            // M(1)/Z with its sample sd
  double weighted_sum = 0.0;      // sum_j j kappa_j + overflow fraction
};

/// kappa_j = E[M_n(j)/Z_n | Z_n > 0] from conditioned occupation statistics.
KappaRow kappa_estimates(int n, std::span<const GenStats> conditioned, int j_max = kHistogramMax);

}  // namespace brw
