#pragma once

#include <cstdint>
#include <vector>

#include "brw/lattice.hpp"
#include "brw/rng.hpp"

namespace brw {

// Conditional law of U_n(x) given U_n(x) >= 1 for the double-or-nothing walk,
// built from a u-transformed path with Bernoulli-gated attached walks.

/// u_0..u_n and P u_0..P u_{n-1} on their natural (unclamped) boxes.
class UFieldBank {
 public:
  UFieldBank(int n, int dim);

  int n() const { return n_; }
  int dim() const { return dim_; }
  const Field& u(int k) const { return u_.at(k); }
  const Field& pu(int k) const { return pu_.at(k); }

 private:
  int n_;
  int dim_;
  std::vector<Field> u_;
  std::vector<Field> pu_;
};

/// Transition row of the u-transformed walk with endpoint (n, x) at step
/// m in 1..n from z: entry i belongs to z + neighborhood(dim)[i].
/// Throws std::domain_error when (P u_{n-m})(x - z) = 0.
std::vector<double> utransform_row(const UFieldBank& bank, int m, const Site& z,
                                   const Site& x);

/// Pinned-walk row P_1(y-z) P_{n-m}(x-y) / P_{n-m+1}(x-z), for comparison.
std::vector<double> pinned_row(int n, int m, const Site& z, const Site& x, int dim = 2);

struct UTransformPath {
  int n = 0;
  Site target = Site::Zero();
  std::vector<Site> path;        // X_0..X_n
  std::vector<double> step_prob; // probability of each chosen step
  double max_row_error = 0.0;    // max |row sum - 1| over visited rows
};

UTransformPath sample_utransform_path(const UFieldBank& bank, const Site& x, Rng& rng);

/// beta_m(w) = 1 / (2 - (P u_{n-m-1})(x - w)).
double beta_m(const UFieldBank& bank, int m, const Site& w, const Site& x);

struct ConditionedDraw {
  std::int64_t value = 0;
  std::int64_t path_checksum = 0;  // sum over m of |X_m|_1
};

/// One draw from the conditional law. Throws std::domain_error if u_n(x) = 0.
ConditionedDraw sample_conditioned(const UFieldBank& bank, const Site& x, Rng& rng);
std::int64_t sample_conditioned(int n, const Site& x, Rng& rng, int dim = 2);

/// Replicate r uses make_stream(seed, Stream::kConditioned, r).
std::vector<ConditionedDraw> sample_conditioned_batch(const UFieldBank& bank, const Site& x,
                                                      std::int64_t reps, std::uint64_t seed);

struct EndpointAudit {
  std::int64_t paths = 0;
  std::int64_t violations = 0;
  double max_row_error = 0.0;
};

/// Samples `reps` u-transformed paths per target and counts those not
/// ending at the target. Unreachable targets raise std::domain_error.
EndpointAudit endpoint_audit(const UFieldBank& bank, const std::vector<Site>& targets,
                             std::int64_t reps, std::uint64_t seed);

}  // namespace brw
