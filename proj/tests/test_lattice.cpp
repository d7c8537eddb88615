#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "brw/lattice.hpp"

using namespace brw;

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Return probability of the lazy planar walk: choose which 2m of the n steps
// move; a 2m-step simple planar walk returns in C(2m, m)^2 ways.
double lazy_return_2d(int n) {
  double s = 0.0;
  for (int m = 0; 2 * m <= n; ++m) s += binom(n, 2 * m) * binom(2 * m, m) * binom(2 * m, m);
  return s * std::pow(5.0, -n);
}

Site s2(int a, int b) { return Site(a, b, 0); }

}  // namespace

TEST_CASE("one step is uniform on the stencil") {
  for (int d = 1; d <= 3; ++d) {
    const Field p = transition_field(1, d);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
    for (const Site& e : neighborhood(d)) CHECK(p(e) == doctest::Approx(1.0 / (2 * d + 1)));
    CHECK(p(Site(1, 1, 0)) == 0.0);
  }
}

TEST_CASE("two-step probabilities by path enumeration") {
  const auto nb = neighborhood(2);
  Field count(2, 2);
  for (const Site& a : nb)
    for (const Site& b : nb) count.at(a + b) += 1.0;
  const Field p = transition_field(2, 2);
  CHECK(p(s2(1, 1)) == doctest::Approx(2.0 / 25.0).epsilon(1e-15));
  Field::for_each_in_box(2, 2, [&](const Site& x) {
    CHECK(p(x) == doctest::Approx(count(x) / 25.0).epsilon(1e-14));
  });
}

TEST_CASE("return probability matches the binomial sum") {
  Field p = Field::delta(2);
  for (int n = 1; n <= 40; ++n) {
    p = apply_markov(p);
    CHECK(p(Site::Zero()) == doctest::Approx(lazy_return_2d(n)).epsilon(1e-12));
  }
  // n P_n(0) approaches 5/(4 pi).
  const Field big = transition_field(2000, 2, clamp_radius(2000));
  CHECK(2000 * big(Site::Zero()) == doctest::Approx(5.0 / (4.0 * M_PI)).epsilon(2e-3));
}

TEST_CASE("mass conservation and tail accounting under a clamp") {
  const Field free = transition_field(30, 2);
  CHECK(free.sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(free.tail_bound() == 0.0);
  const Field tight = transition_field(30, 2, 4);
  CHECK(tight.radius() == 4);
  CHECK(tight.sum() + tight.tail_bound() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(tight.tail_bound() > 0.0);
  // Clamped values never exceed the exact ones.
  Field::for_each_in_box(2, 4, [&](const Site& x) { CHECK(tight(x) <= free(x) + 1e-16); });
}

TEST_CASE("default clamp drops negligible mass") {
  const Field p = transition_field(400, 2, clamp_radius(400));
  CHECK(p.tail_bound() <= hoeffding_tail(400, 2, clamp_radius(400)) + 1e-300);
  CHECK(p.tail_bound() < 1e-30);
}

TEST_CASE("symmetry under reflections and coordinate swaps") {
  const Field p = transition_field(9, 3);
  Field::for_each_in_box(3, 9, [&](const Site& x) {
    CHECK(p(x) == doctest::Approx(p(Site(-x(0), x(1), x(2)))).epsilon(1e-14));
    CHECK(p(x) == doctest::Approx(p(Site(x(1), x(0), x(2)))).epsilon(1e-14));
    CHECK(p(x) == doctest::Approx(p(Site(x(2), x(1), x(0)))).epsilon(1e-14));
  });
}

TEST_CASE("Chapman-Kolmogorov through convolution") {
  const Field a = transition_field(5, 2);
  const Field b = transition_field(7, 2);
  const Field c = transition_field(12, 2);
  const Field ab = convolve(a, b);
  Field::for_each_in_box(2, 12, [&](const Site& x) {
    CHECK(ab(x) == doctest::Approx(c(x)).epsilon(1e-13));
  });
}

TEST_CASE("field csv round trip") {
  const Field p = transition_field(4, 2, 3);
  std::stringstream ss;
  write_field_csv(ss, p);
  const Field q = read_field_csv(ss);
  CHECK(q.dim() == 2);
  CHECK(q.radius() == 3);
  CHECK(q.steps() == 4);
  CHECK(q.tail_bound() == doctest::Approx(p.tail_bound()));
  CHECK(((q.values() - p.values()).abs().maxCoeff()) < 1e-16);
}

TEST_CASE("sampled steps are uniform and paths stay on the lattice") {
  Rng rng = make_stream(7, Stream::kSelfTest, 0);
  const auto nb = neighborhood(2);
  std::vector<int> hits(nb.size(), 0);
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    const Site s = sample_step(2, rng);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (nb[k] == s) ++hits[k];
  }
  for (int h : hits) CHECK(std::abs(h - draws / 5.0) < 5 * std::sqrt(draws * 0.2 * 0.8));
  const auto path = sample_srw(100, 3, rng);
  REQUIRE(path.size() == 101);
  CHECK(path.front() == Site::Zero());
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(l1_norm(path[i] - path[i - 1]) <= 1);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS(Field(4, 1));
  CHECK_THROWS(Field(2, -1));
  Field f(2, 1);
  CHECK_THROWS(f.at(s2(2, 0)));
  CHECK(f(s2(2, 0)) == 0.0);
}
