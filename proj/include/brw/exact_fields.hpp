#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brw/lattice.hpp"
#include "brw/offspring.hpp"

namespace brw {

/// Raised when an mgf-type recursion leaves the pgf domain or overflows.
class MgfBlowup : public std::runtime_error {
 public:
  explicit MgfBlowup(int step)
      : std::runtime_error("mgf blowup at step " + std::to_string(step)), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

// ---------------------------------------------------------------------------
// Survival and hitting probabilities

/// s_n = P(Z_n > 0) by s_{k+1} = 1 - Phi(1 - s_k), s_0 = 1.
double survival_prob(const OffspringDist& dist, int n);
/// s_0..s_n.
std::vector<double> survival_sequence(const OffspringDist& dist, int n);

/// One step of u_{k+1}(x) = 1 - Phi(1 - P u_k(x)), returning the new field.
Field hitting_step(const OffspringDist& dist, const Field& u,
                   std::optional<int> clamp = std::nullopt);

/// u_n(x) = P{U_n(x) >= 1} via the extinction-pgf recursion.
Field hitting_field(const OffspringDist& dist, int n, int dim,
                    std::optional<int> clamp = std::nullopt);

/// u_0..u_n (each on its natural box, optionally clamped).
std::vector<Field> hitting_fields(const OffspringDist& dist, int n, int dim,
                                  std::optional<int> clamp = std::nullopt);

/// Binary-only direct form u_{k+1} = P u_k - (P u_k)^2 / 2.
Field hitting_field_kpp(int n, int dim, std::optional<int> clamp = std::nullopt);
Field kpp_step(const Field& u, std::optional<int> clamp = std::nullopt);

/// Sum_x u_n(x), the expected number of occupied sites, with the certified
/// tail of the field.
struct OccupiedMean {
  double value = 0.0;
  double tail_bound = 0.0;
};
OccupiedMean mean_occupied(const OffspringDist& dist, int n, int dim,
                           std::optional<int> clamp = std::nullopt);

// ---------------------------------------------------------------------------
// Moment generating fields

/// G_n(x; theta) = E exp(theta U_n(x)) - 1 via G_{k+1} + 1 = Phi(P G_k + 1).
/// Throws MgfBlowup when an argument leaves the pgf domain.
Field mgf_field(const OffspringDist& dist, int n, double theta, int dim,
                std::optional<int> clamp = std::nullopt);

/// Linear dominating recursion H_1 = G_1, H_{k+1} = (P H_k) Phi'(1 + H_k(0)).
Field dominating_field(const OffspringDist& dist, int n, double theta, int dim,
                       std::optional<int> clamp = std::nullopt);

/// Product form H_n = P_n H_1(0) (2d+1) prod_{j<n} Phi'(1 + H_j(0)), with
/// H_j(0) from the same product applied to the return probabilities.
Field dominating_field_closed(const OffspringDist& dist, int n, double theta, int dim,
                              std::optional<int> clamp = std::nullopt);

// ---------------------------------------------------------------------------
// Second moments

/// E U_n(x)^2 via f_k = P f_{k-1} + sigma^2 P_k^2, f_0 = delta.
Field second_moment_field(const OffspringDist& dist, int n, int dim,
                          std::optional<int> clamp = std::nullopt);
/// Same recursion; `visit(k, f_k)` is called for k = 1..n.
void for_each_second_moment(const OffspringDist& dist, int n, int dim,
                            std::optional<int> clamp,
                            const std::function<void(int, const Field&)>& visit);

// ---------------------------------------------------------------------------
// Exact law oracle

/// Truncated pmf of U_n(x) at every site of the box of radius n.
class PmfField {
 public:
  PmfField(int dim, int radius, int degree);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  int degree() const { return degree_; }
  /// Row i holds p_0..p_D of the site with flat index i.
  Eigen::ArrayXXd& probs() { return probs_; }
  const Eigen::ArrayXXd& probs() const { return probs_; }
  /// Certified bound on P(U_n(x) > D) per site.
  Eigen::ArrayXd& truncated_mass() { return truncated_; }
  const Eigen::ArrayXd& truncated_mass() const { return truncated_; }

  Eigen::ArrayXd pmf(const Site& x) const;
  /// Fields of E U, E U^2 and 1 - p_0 from the truncated pmf.
  Field mean_field() const;
  Field second_moment_field() const;
  Field hit_field() const;
  double max_truncated_mass() const { return truncated_.maxCoeff(); }

  const Field& layout() const { return layout_; }

 private:
  int dim_;
  int radius_;
  int degree_;
  Field layout_;
  Eigen::ArrayXXd probs_;
  Eigen::ArrayXd truncated_;
};

/// Conditioning on the first generation applied to per-site generating
/// polynomials, truncated at degree D. Throws if the certified truncated
/// mass exceeds `max_truncated` anywhere.
PmfField pmf_oracle(const OffspringDist& dist, int n, int dim, int degree = 64,
                    double max_truncated = 1e-9);

// ---------------------------------------------------------------------------
// Super-solution of the hitting recursion (binary, d = 2)

struct SuperSolutionParams {
  double kappa = 0.0;
  double beta = 2.5;

  /// beta_n = beta (1 - 1/ln n).
  double beta_n(int n) const;
  /// Smallest kappa covered by the interior estimate: 4 exp(6 beta).
  static double kappa0(double beta = 2.5);
};

/// v_n(x) = kappa / (n ln n) exp(-beta_n |x|^2 / (2n)) on the given box.
Field supersolution_field(const SuperSolutionParams& params, int n, int radius,
                          int dim = 2);
double supersolution_value(const SuperSolutionParams& params, int n, const Site& x);

enum class MarginRegime { kInner, kMiddle, kOuter, kFar };
const char* regime_name(MarginRegime r);

/// Label used only for diagnostics: |x| <= sqrt(10n), <= delta n, <= 3n, beyond.
MarginRegime margin_regime(int n, const Site& x, double delta = 0.1);

/// log v_{n+1}(x) - log[(P v_n)(x) (1 - (P v_n)(x)/2)]; positive where the
/// super-solution inequality holds. +infinity when (P v_n)(x) >= 2.
double supersolution_margin(const SuperSolutionParams& params, int n, const Site& x);

struct SupersolutionReport {
  SuperSolutionParams params;
  int n_lo = 0;
  int n_hi = 0;
  double x_factor = 3.0;
  bool holds = false;
  double min_margin = 0.0;
  int argmin_n = 0;
  Site argmin_x = Site::Zero();
  /// Minimum margin per diagnostic regime (inner, middle, outer).
  double regime_min[3] = {0.0, 0.0, 0.0};
};

/// Checks the inequality for every n in [n_lo, n_hi] and every lattice x
/// with |x| <= x_factor * n by direct evaluation.
SupersolutionReport verify_supersolution(const SuperSolutionParams& params, int n_lo,
                                         int n_hi, double x_factor = 3.0);

/// Smallest N0 >= 2 such that the inequality holds on [N0, 4 N0]; empty if
/// none up to n0_max.
std::optional<int> find_supersolution_n0(const SuperSolutionParams& params,
                                         int n0_max = 64, double x_factor = 3.0);

/// Smallest N1 >= n0 with N1 ln N1 >= kappa0.
int find_comparison_shift(int n0, double kappa0);

// ---------------------------------------------------------------------------
// Comparison principle

struct ComparisonReport {
  bool holds = false;
  bool hypotheses_ok = false;
  int steps = 0;
  int first_violation_n = -1;
  Site first_violation_x = Site::Zero();
  double max_excess = 0.0;  // max over (n, x) of u_n(x) - v_n(x)
  std::string detail;
};

/// Incremental checker: feed (u_k, v_k) for k = 0, 1, ... It checks that u
/// follows the binary hitting recursion, that v is a super-solution, and
/// that v_k >= u_k - slack everywhere on the common box.
class ComparisonChecker {
 public:
  explicit ComparisonChecker(double slack = 1e-12) : slack_(slack) {}
  void push(const Field& u, const Field& v);
  const ComparisonReport& report() const { return report_; }

 private:
  double slack_;
  std::optional<Field> prev_u_;
  std::optional<Field> prev_v_;
  ComparisonReport report_{true, true, 0, -1, Site::Zero(), 0.0, {}};
};

bool verify_comparison(const std::vector<Field>& u_seq, const std::vector<Field>& v_seq,
                       ComparisonReport* report = nullptr);

/// Streams u_n (binary, exact recursion) against v_{shift+n} for n <= n_max.
ComparisonReport verify_supersolution_dominates(const SuperSolutionParams& params,
                                                int shift, int n_max,
                                                std::optional<int> clamp = std::nullopt);

// ---------------------------------------------------------------------------
// Orthant monotonicity

/// max over y in the positive orthant and x <= y (componentwise) of
/// f(y) - f(x); non-positive when f is orthant-monotone.
double max_orthant_violation(const Field& f);

}  // namespace brw
