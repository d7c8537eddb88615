#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

enum class TailClass { kFiniteSupport, kPolynomial, kExponential };

/// Critical offspring law Q (mean one, positive finite variance).
///
/// Finite-support laws are stored exactly. Infinite-support families keep an
/// explicit table up to `table_max()` and a closed-form tail, so sampling
/// and the generating function stay exact.
class OffspringDist {
 public:
  /// Double-or-nothing: Q_0 = Q_2 = 1/2.
  static OffspringDist binary();
  /// Q_0 = r, Q_l = (1-r)^2 r^(l-1) for l >= 1; exponential tail.
  static OffspringDist geometric(double ratio);
  /// Q_l proportional to l^-(alpha+1.5) for l >= 2 with Q_0 = Q_1 chosen
  /// to make the mean one. Moments of order < alpha + 1/2 are finite.
  static OffspringDist zeta(double alpha);
  /// Explicit finite table of (l, Q_l) pairs.
  static OffspringDist table(std::vector<std::pair<int, double>> probs,
                             std::string tag = "table");

  /// "binary" | "geometric:<r>" | "zeta:<alpha>" | "table:l=q,l=q,..."
  static OffspringDist parse(const std::string& spec);

  const std::string& tag() const { return tag_; }
  TailClass tail_class() const { return tail_class_; }
  /// alpha for polynomial tails, -ln(ratio) for exponential ones.
  double tail_parameter() const { return tail_param_; }

  double sigma2() const { return sigma2_; }
  bool is_binary() const { return binary_; }

  /// Upper end of the pgf domain (radius of convergence, inclusive for
  /// finite support).
  double z_max() const { return z_max_; }

  /// Q_l; exact for any l.
  double prob(std::int64_t l) const;
  /// Nonzero (l, Q_l) pairs of the explicit table.
  std::vector<std::pair<int, double>> support() const;
  int table_max() const { return static_cast<int>(probs_.size()) - 1; }

  double pgf(double z) const;
  double pgf_prime(double z) const;
  /// Phi(1 + y) - 1 without cancellation for small |y|; y >= -1.
  double pgf_excess(double y) const;

  std::int64_t sample(Rng& rng) const;
  /// Sum of k iid draws (law Q^{*k}).
  std::int64_t sample_sum(std::int64_t k, Rng& rng) const;

 private:
  OffspringDist() = default;
  void finish();
  void check_domain(double z) const;
  std::int64_t sample_tail(Rng& rng) const;

  std::string tag_;
  TailClass tail_class_ = TailClass::kFiniteSupport;
  double tail_param_ = 0.0;
  bool binary_ = false;
  std::vector<double> probs_;  // Q_0..Q_L
  double tail_mass_ = 0.0;     // mass above L
  double ratio_ = 0.0;         // geometric
  double zeta_scale_ = 0.0;    // zeta normalizer c
  double zeta_power_ = 0.0;    // zeta exponent s
  double sigma2_ = 0.0;
  double z_max_ = std::numeric_limits<double>::infinity();
  std::vector<double> cdf_;    // cumulative Q_0..Q_L (tail bucket after)
};

/// Q^{*k} sample; free-function form of OffspringDist::sample_sum.
inline std::int64_t sample_offspring_sum(const OffspringDist& dist,
                                         std::int64_t k, Rng& rng) {
  return dist.sample_sum(k, rng);
}

/// Largest admissible delta for the constructive lower bound on the
/// maximal occupancy: sup over l0 > 1 of (l0-1) / (-l0 ln p) with
/// p = Q_l0 (2d+1)^-l0.
double max_occupancy_delta(const OffspringDist& dist, int dim);

}  // namespace brw
