#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brw/exact_fields.hpp"
#include "brw/parallel.hpp"
#include "brw/spine_sim.hpp"
#include "brw/stats.hpp"

using namespace brw;

TEST_CASE("size-biased law of Z_2") {
  // Size biasing multiplies P(Z_2 = k) by k / E Z_2: 2 * 1/4 = 4 * 1/8 = 1/2.
  const int reps = 40000;
  std::vector<double> two(reps), four(reps);
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_stream(1, Stream::kSpine, r);
    const auto z = sample_size_biased(2, 2, rng).occupancy.total();
    CHECK((z == 2 || z == 4));
    two[r] = z == 2 ? 1.0 : 0.0;
    four[r] = z == 4 ? 1.0 : 0.0;
  }
  const EstimateCI a = estimate(two), b = estimate(four);
  CHECK(std::abs(a.mean - 0.5) < 3.5 * a.std_error);
  CHECK(std::abs(b.mean - 0.5) < 3.5 * b.std_error);
}

TEST_CASE("size-bias identity against forward runs") {
  const auto z3 = sizebias_check([](const GenStats& s) { return static_cast<double>(s.Z); },
                                 3, 2, 50000, 17);
  CHECK(std::abs(z3.z) < 4.0);
  // E_H Z_3 = E Z_3^2 = 1 + 3 sigma^2.
  CHECK(std::abs(z3.lhs - 4.0) < 4.0 * z3.lhs_se);
  const auto v = sizebias_check([](const GenStats& s) { return static_cast<double>(s.V); },
                                5, 2, 20000, 18);
  CHECK(std::abs(v.z) < 4.0);
}

TEST_CASE("spine occupancy always contains the spine and its last sibling") {
  for (int r = 0; r < 200; ++r) {
    Rng rng = make_stream(2, Stream::kSpine, r);
    const auto sb = sample_size_biased(12, 2, rng);
    CHECK(sb.occupancy.count_at(sb.spine_end) >= 1);
    CHECK(sb.occupancy.total() >= 2);
    const BallSample b = sample_ball(12, 2, 2, rng);
    CHECK(b.W >= 2);
    CHECK(b.sites == 13);
  }
}

TEST_CASE("exact mean of Gamma") {
  double direct = 0.0;
  for (int i = 2; i <= 12; ++i) direct += transition_field(2 * i, 2)(Site::Zero());
  CHECK(exact_mean_gamma(12, 2) == doctest::Approx(direct).epsilon(1e-13));
  CHECK(exact_mean_gamma(1, 2) == 0.0);
}

TEST_CASE("typical-site representation: mean and agreement with the full spine walk") {
  const int n = 8;
  const int reps = 60000;
  const double target = 1.0 + 0.2 + exact_mean_gamma(n, 2);
  const auto rep = map_replicates(reps, [&](std::int64_t r) {
    Rng rng = make_stream(3, Stream::kSpine, r);
    return static_cast<double>(sample_typical_occupancy(n, 2, rng));
  });
  const auto full = map_replicates(reps, [&](std::int64_t r) {
    Rng rng = make_stream(3, Stream::kForward, r);
    const auto sb = sample_size_biased(n, 2, rng);
    return static_cast<double>(sb.occupancy.count_at(sb.spine_end));
  });
  const EstimateCI a = estimate(rep), b = estimate(full);
  CHECK(std::abs(a.mean - target) < 4.0 * a.std_error);
  CHECK(std::abs(b.mean - target) < 4.0 * b.std_error);
}

TEST_CASE("typical occupancy at n = 1 is one plus a Bernoulli(1/5)") {
  const int reps = 50000;
  int two = 0;
  for (int r = 0; r < reps; ++r) {
    Rng rng = make_stream(4, Stream::kSpine, r);
    const auto t = sample_typical_occupancy(1, 2, rng);
    CHECK((t == 1 || t == 2));
    two += t == 2;
  }
  CHECK(std::abs(two - reps * 0.2) < 4.0 * std::sqrt(reps * 0.2 * 0.8));
}

TEST_CASE("Gamma/Delta batch") {
  SpineBatchConfig cfg;
  cfg.n = 24;
  cfg.reps = 20000;
  cfg.seed = 5;
  cfg.tracked_terms = {1, 5, 20};
  const auto out = sample_gamma_delta(cfg);
  REQUIRE(out.size() == 20000);
  std::vector<double> g, d, x1, x20;
  for (const auto& s : out) {
    CHECK(s.clamp_misses == 0);
    CHECK(s.delta == doctest::Approx(static_cast<double>(s.t_star - 1 - s.b0) - s.gamma));
    g.push_back(s.gamma);
    d.push_back(s.delta);
    x1.push_back(s.tracked[0]);
    x20.push_back(s.tracked[2]);
  }
  const EstimateCI eg = estimate(g), ed = estimate(d), e1 = estimate(x1), e20 = estimate(x20);
  CHECK(std::abs(eg.mean - exact_mean_gamma(24, 2)) < 4.0 * eg.std_error);
  CHECK(std::abs(ed.mean) < 4.0 * ed.std_error);
  CHECK(std::abs(e1.mean) < 4.0 * e1.std_error);
  CHECK(std::abs(e20.mean) < 4.0 * e20.std_error);
  // Replicate r depends only on (seed, r).
  cfg.reps = 10;
  const auto head = sample_gamma_delta(cfg);
  for (int r = 0; r < 10; ++r) CHECK(head[r].t_star == out[r].t_star);
}
