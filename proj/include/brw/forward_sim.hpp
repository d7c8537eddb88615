#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "brw/lattice.hpp"
#include "brw/offspring.hpp"
#include "brw/rng.hpp"

namespace brw {

/// Packed site key: 21 bits per coordinate with offset 2^20, first
/// coordinate most significant, so key order is lexicographic site order.
using SiteKey = std::uint64_t;

SiteKey pack_site(const Site& x);
Site unpack_site(SiteKey key);

struct OccupancyEntry {
  SiteKey key;
  std::int64_t count;
};

/// Site -> particle count for one generation. Entries are sorted by key and
/// every stored count is positive.
class SparseOccupancy {
 public:
  explicit SparseOccupancy(int dim = 2, int generation = 0) : dim_(dim), generation_(generation) {
    check_dim(dim);
  }

  static SparseOccupancy single(int dim, const Site& at = Site::Zero());

  int dim() const { return dim_; }
  int generation() const { return generation_; }
  void set_generation(int n) { generation_ = n; }

  bool empty() const { return entries_.empty(); }
  std::size_t site_count() const { return entries_.size(); }
  std::int64_t total() const;
  std::int64_t count_at(const Site& x) const;

  const std::vector<OccupancyEntry>& entries() const { return entries_; }

  /// Adds particles; call normalize() after a batch of adds.
  void add(const Site& x, std::int64_t count);
  void normalize();

  /// Shift every particle by `offset`.
  SparseOccupancy translated(const Site& offset) const;
  /// Union with particle counts added.
  void merge(const SparseOccupancy& other);

  std::vector<OccupancyEntry>& raw_entries() { return entries_; }

 private:
  int dim_;
  int generation_;
  std::vector<OccupancyEntry> entries_;
};

/// One generation: every site with k particles draws Q^{*k} offspring and
/// scatters them multinomially over the 2d+1 stencil sites by sequential
/// binomial splitting in stencil order.
SparseOccupancy step(const SparseOccupancy& occ, const OffspringDist& dist, Rng& rng);
void step_into(const SparseOccupancy& occ, const OffspringDist& dist, Rng& rng,
               SparseOccupancy& out);

constexpr int kHistogramMax = 64;

struct GenStats {
  int n = 0;
  std::int64_t Z = 0;
  std::int64_t V = 0;
  std::int64_t Omega = 0;
  /// M[j] = number of sites holding exactly j particles, j = 1..kHistogramMax.
  std::vector<std::int64_t> M = std::vector<std::int64_t>(kHistogramMax + 1, 0);
  std::int64_t overflow_sites = 0;
  std::int64_t overflow_mass = 0;
  /// Occupancy at a site drawn with probability U(x)/Z, and that site.
  std::optional<std::int64_t> T;
  std::optional<Site> S;
};

/// Occupation statistics; draws the typical site when `typical_rng` is set
/// and Z > 0.
GenStats compute_stats(const SparseOccupancy& occ, Rng* typical_rng = nullptr);

struct RunOptions {
  bool typical = true;
  bool keep_occupancy = false;
};

struct RunResult {
  GenStats stats;
  std::int64_t attempts = 1;
  std::optional<SparseOccupancy> occupancy;
};

/// n generations from one particle at the origin.
RunResult run(const OffspringDist& dist, int n, int dim, Rng& rng, RunOptions opts = {});

/// Occupancy after n generations from one particle at `start`.
SparseOccupancy evolve(const OffspringDist& dist, int n, int dim, Rng& rng,
                       const Site& start = Site::Zero());

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::int64_t attempts)
      : std::runtime_error("conditioning budget exceeded after " + std::to_string(attempts) +
                           " attempts"),
        attempts_(attempts) {}
  std::int64_t attempts() const { return attempts_; }

 private:
  std::int64_t attempts_;
};

/// Exact law given survival to generation n, by rejection.
RunResult run_conditioned(const OffspringDist& dist, int n, int dim, Rng& rng,
                          RunOptions opts = {}, std::int64_t max_attempts = 100'000'000);

/// Z_n alone. The population size of the walk is a Galton-Watson process,
/// so no positions are tracked.
std::int64_t run_population(const OffspringDist& dist, int n, Rng& rng);

struct PopulationSample {
  std::int64_t Z = 0;
  std::int64_t attempts = 0;
};
PopulationSample run_population_conditioned(const OffspringDist& dist, int n, Rng& rng,
                                            std::int64_t max_attempts = 100'000'000);

/// U_gens(target) for a walk started at the origin. Particles that can no
/// longer reach the target are discarded, which leaves the count exact.
std::int64_t count_at(const OffspringDist& dist, int gens, int dim, const Site& target,
                      Rng& rng);

/// Particles at sites occupied by the descendants of both of two independent
/// walks started at x_u and x_v: sum_x (U^u + U^v)(x) 1{U^u(x) > 0, U^v(x) > 0}.
std::int64_t overlap_stat(const OffspringDist& dist, int n, int dim, const Site& x_u,
                          const Site& x_v, Rng& rng);

struct BallStats {
  std::int64_t sites = 0;       // lattice points in the ball
  std::int64_t unoccupied = 0;  // of which empty
  std::int64_t particles = 0;   // particles inside the ball
};

/// Euclidean ball |y - center| <= ell.
BallStats ball_stats(const SparseOccupancy& occ, const Site& center, int ell);

/// Lattice points of the Euclidean ball of radius ell around the origin.
std::vector<Site> ball_offsets(int dim, int ell);

}  // namespace brw
