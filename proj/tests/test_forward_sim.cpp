#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "brw/exact_fields.hpp"
#include "brw/forward_sim.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"

using namespace brw;

namespace {

const OffspringDist kBinary = OffspringDist::binary();

Site s2(int a, int b) { return Site(a, b, 0); }

// E D_1 for two walks from x_u and x_v by enumerating both first generations.
double overlap_n1_exact(const Site& xu, const Site& xv) {
  const auto nb = neighborhood(2);
  // Each walk: with prob 1/2 empty, else two particles at independent
  // uniform neighbours (25 equally likely placements).
  std::vector<std::pair<double, std::map<std::vector<int>, int>>> outcomes_u, outcomes_v;
  auto build = [&](const Site& start, auto& out) {
    out.push_back({0.5, {}});
    for (const Site& a : nb)
      for (const Site& b : nb) {
        std::map<std::vector<int>, int> occ;
        const Site pa = start + a, pb = start + b;
        ++occ[{pa(0), pa(1)}];
        ++occ[{pb(0), pb(1)}];
        out.push_back({0.5 / 25.0, occ});
      }
  };
  build(xu, outcomes_u);
  build(xv, outcomes_v);
  double e = 0.0;
  for (const auto& [pu, ou] : outcomes_u)
    for (const auto& [pv, ov] : outcomes_v) {
      int d = 0;
      for (const auto& [site, cu] : ou) {
        const auto it = ov.find(site);
        if (it != ov.end()) d += cu + it->second;
      }
      e += pu * pv * d;
    }
  return e;
}

}  // namespace

TEST_CASE("site keys round trip") {
  for (const Site& x : {s2(0, 0), s2(-5, 7), Site(1000, -1000, 3), Site(-1048576, 1048575, 0)}) {
    CHECK(unpack_site(pack_site(x)) == x);
  }
  CHECK_THROWS(pack_site(Site(1 << 21, 0, 0)));
}

TEST_CASE("occupancy bookkeeping") {
  SparseOccupancy occ(2, 0);
  occ.add(s2(1, 0), 2);
  occ.add(s2(0, 0), 1);
  occ.add(s2(1, 0), 3);
  occ.normalize();
  CHECK(occ.total() == 6);
  CHECK(occ.count_at(s2(1, 0)) == 5);
  CHECK(occ.count_at(s2(2, 0)) == 0);
  CHECK(occ.entries().size() == 2);
  const GenStats s = compute_stats(occ);
  CHECK(s.Z == 6);
  CHECK(s.V == 5);
  CHECK(s.Omega == 2);
  CHECK(s.M[1] == 1);
  CHECK(s.M[5] == 1);
}

TEST_CASE("histogram accounts for every particle") {
  Rng rng = make_stream(1, Stream::kSelfTest, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const RunResult r = run(kBinary, 40, 2, rng);
    std::int64_t mass = r.stats.overflow_mass, sites = r.stats.overflow_sites;
    for (int j = 1; j <= kHistogramMax; ++j) {
      mass += j * r.stats.M[j];
      sites += r.stats.M[j];
    }
    CHECK(mass == r.stats.Z);
    CHECK(sites == r.stats.Omega);
    if (r.stats.Z > 0) {
      REQUIRE(r.stats.T.has_value());
      CHECK(*r.stats.T >= 1);
      CHECK(*r.stats.T <= r.stats.V);
    }
  }
}

TEST_CASE("law of Z_2 by hand enumeration") {
  // Z_2 = 0 w.p. 1/2 + 1/2 * 1/4, = 2 w.p. 1/2 * 2 * 1/4, = 4 w.p. 1/8.
  const std::vector<double> probs = {5.0 / 8.0, 0.0, 1.0 / 4.0, 0.0, 1.0 / 8.0};
  const int reps = 40000;
  std::vector<std::int64_t> obs_full(5, 0), obs_pop(5, 0);
  for (int r = 0; r < reps; ++r) {
    Rng a = make_stream(2, Stream::kForward, r);
    Rng b = make_stream(2, Stream::kPopulation, r);
    ++obs_full.at(run(kBinary, 2, 2, a).stats.Z);
    ++obs_pop.at(run_population(kBinary, 2, b));
  }
  CHECK(obs_full[1] == 0);
  CHECK(obs_full[3] == 0);
  const std::vector<std::int64_t> full = {obs_full[0], obs_full[2], obs_full[4]};
  const std::vector<std::int64_t> pop = {obs_pop[0], obs_pop[2], obs_pop[4]};
  const std::vector<double> p = {probs[0], probs[2], probs[4]};
  CHECK(chi_square(full, p).p_value > 1e-3);
  CHECK(chi_square(pop, p).p_value > 1e-3);
}

TEST_CASE("mean site occupancy equals the transition probability") {
  const int n = 6;
  const Field p = transition_field(n, 2);
  const int reps = 40000;
  for (const Site& x : {s2(0, 0), s2(1, 0), s2(2, 1)}) {
    std::vector<double> v(reps), w(reps);
    for (int r = 0; r < reps; ++r) {
      Rng a = make_stream(3, Stream::kForward, r);
      Rng b = make_stream(3, Stream::kOverlap, r);
      v[r] = static_cast<double>(evolve(kBinary, n, 2, a).count_at(x));
      w[r] = static_cast<double>(count_at(kBinary, n, 2, x, b));
    }
    const EstimateCI ev = estimate(v), ew = estimate(w);
    CHECK(std::abs(ev.mean - p(x)) < 4.0 * ev.std_error);
    CHECK(std::abs(ew.mean - p(x)) < 4.0 * ew.std_error);
  }
}

TEST_CASE("conditioning on survival") {
  const int n = 10;
  const double s = survival_prob(kBinary, n);
  const int reps = 4000;
  std::vector<double> att(reps);
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_stream(4, Stream::kConditioned, r);
    const RunResult res = run_conditioned(kBinary, n, 2, rng);
    CHECK(res.stats.Z > 0);
    att[r] = static_cast<double>(res.attempts);
  }
  const EstimateCI e = estimate(att);
  CHECK(std::abs(e.mean - 1.0 / s) < 4.0 * e.std_error);
  Rng rng = make_stream(4, Stream::kConditioned, 99);
  CHECK_THROWS_AS(run_conditioned(kBinary, 200, 2, rng, {}, 1), BudgetExceeded);
}

TEST_CASE("overlap statistic at n = 1") {
  const int reps = 200000;
  for (const Site& xv : {s2(0, 0), s2(1, 0), s2(1, 1)}) {
    const double exact = overlap_n1_exact(Site::Zero(), xv);
    const auto d = map_replicates(reps, [&](std::int64_t r) {
      Rng rng = make_stream(5, Stream::kOverlap, r);
      return static_cast<double>(overlap_stat(kBinary, 1, 2, Site::Zero(), xv, rng));
    });
    const EstimateCI e = estimate(d);
    CHECK(std::abs(e.mean - exact) < 4.0 * e.std_error);
    CHECK(exact <= 2.0 * transition_field(2, 2)(xv) + 1e-15);
  }
}

TEST_CASE("Euclidean balls") {
  CHECK(ball_offsets(2, 1).size() == 5);
  CHECK(ball_offsets(2, 2).size() == 13);
  CHECK(ball_offsets(3, 1).size() == 7);
  SparseOccupancy occ(2, 0);
  occ.add(s2(0, 0), 3);
  occ.add(s2(2, 0), 1);
  occ.add(s2(2, 1), 1);
  occ.normalize();
  const BallStats b = ball_stats(occ, Site::Zero(), 2);
  CHECK(b.sites == 13);
  CHECK(b.particles == 4);
  CHECK(b.unoccupied == 11);
}

TEST_CASE("replay and worker-count independence") {
  auto draw = [](int workers) {
    return map_replicates(
        64,
        [](std::int64_t r) {
          Rng rng = make_stream(6, Stream::kForward, r);
          const auto s = run(kBinary, 30, 2, rng).stats;
          return s.Z * 1000003 + s.V * 101 + s.Omega;
        },
        workers);
  };
  const auto a = draw(1);
  CHECK(a == draw(1));
  CHECK(a == draw(3));
}
