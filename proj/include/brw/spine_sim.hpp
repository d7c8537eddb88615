#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "brw/forward_sim.hpp"
#include "brw/lattice.hpp"
#include "brw/rng.hpp"

namespace brw {

// Size-biased (spine) constructions for the double-or-nothing walk.

/// Full size-biased walk at generation n: a distinguished particle follows
/// a lazy random walk and at every generation leaves a sibling that starts
/// an ordinary critical walk. The spine particle is included in `occupancy`.
struct SizeBiasedSample {
  SparseOccupancy occupancy;
  Site spine_end = Site::Zero();
};
SizeBiasedSample sample_size_biased(int n, int dim, Rng& rng);

/// Auxiliary variables of the typical-site representation
/// T = 1 + B0 + sum_{j=2}^{n} U^{j-1}_{j-1}(S_j + xi_{j-1}).
struct SpineRealization {
  std::vector<Site> path;                // S_0..S_n
  std::vector<Site> xi;                  // xi_0..xi_{n-1}
  int b0 = 0;                            // Bernoulli(1/(2d+1))
  std::vector<std::int64_t> attached;    // attached[j] = U^{j-1}_{j-1}(S_j + xi_{j-1}), j >= 2

  std::int64_t t_star() const;
};

/// Draws the representation; attached walks are skipped when
/// `with_attached` is false (only the path is then meaningful).
SpineRealization sample_spine_realization(int n, int dim, Rng& rng, bool with_attached = true);

/// One draw of the occupancy at a typical site under the size-biased law.
std::int64_t sample_typical_occupancy(int n, int dim, Rng& rng);

/// sum_{i=2}^{n} P_{2i}(0), computed as sum_i sum_x P_i(x)^2 on clamped
/// transition fields.
double exact_mean_gamma(int n, int dim = 2, double clamp_c = 6.0);

struct SpineBatchConfig {
  int n = 0;
  int dim = 2;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  bool with_attached = true;
  /// Indices i whose centred term X_i = U^i_i(S_{i+1} + xi_i) - P_{i+1}(S_{i+1})
  /// is recorded per replicate.
  std::vector<int> tracked_terms;
  double clamp_c = 6.0;
};

struct SpineSample {
  std::int64_t rep = 0;
  std::int64_t t_star = 0;
  int b0 = 0;
  double gamma = 0.0;   // sum_{i=2}^{n} P_i(S_i)
  double delta = 0.0;   // t_star - 1 - b0 - gamma
  std::int64_t clamp_misses = 0;
  std::vector<double> tracked;  // X_i for SpineBatchConfig::tracked_terms
};

/// Replicate r uses make_stream(seed, Stream::kSpine, r). The transition
/// fields are swept once for the whole batch.
std::vector<SpineSample> sample_gamma_delta(const SpineBatchConfig& cfg);

struct BallSample {
  std::int64_t W = 0;           // particles within distance ell of the spine
  std::int64_t unoccupied = 0;  // empty lattice points of that ball
  std::int64_t sites = 0;
  std::int64_t Z = 0;
};
BallSample sample_ball(int n, int ell, int dim, Rng& rng);
inline std::int64_t sample_ball_count(int n, int ell, int dim, Rng& rng) {
  return sample_ball(n, ell, dim, rng).W;
}

struct SizeBiasCheck {
  double lhs = 0.0;      // size-biased mean of f
  double lhs_se = 0.0;
  double rhs = 0.0;      // mean of Z_n f under the original law
  double rhs_se = 0.0;
  double z = 0.0;
};

/// Compares E_H[f] from the spine sampler with E[Z_n f] from forward runs.
SizeBiasCheck sizebias_check(const std::function<double(const GenStats&)>& f, int n, int dim,
                             std::int64_t reps, std::uint64_t seed);

}  // namespace brw
