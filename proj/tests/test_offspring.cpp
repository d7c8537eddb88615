#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brw/offspring.hpp"

using namespace brw;

namespace {

// Direct series moments from prob(l); the tail beyond `terms` is ignored.
struct Moments {
  double mass = 0.0, mean = 0.0, second = 0.0;
};
Moments series(const OffspringDist& q, int terms) {
  Moments m;
  for (int l = 0; l < terms; ++l) {
    const double p = q.prob(l);
    m.mass += p;
    m.mean += l * p;
    m.second += static_cast<double>(l) * l * p;
  }
  return m;
}

}  // namespace

TEST_CASE("binary law") {
  const auto q = OffspringDist::binary();
  CHECK(q.is_binary());
  CHECK(q.prob(0) == 0.5);
  CHECK(q.prob(1) == 0.0);
  CHECK(q.prob(2) == 0.5);
  CHECK(q.sigma2() == doctest::Approx(1.0));
  CHECK(q.pgf(0.0) == doctest::Approx(0.5));
  CHECK(q.pgf(0.5) == doctest::Approx(0.625));
  CHECK(q.pgf_prime(1.0) == doctest::Approx(1.0));
  CHECK(q.tail_class() == TailClass::kFiniteSupport);
}

TEST_CASE("geometric law moments agree with the series") {
  for (double r : {0.2, 0.5, 0.8}) {
    const auto q = OffspringDist::geometric(r);
    const Moments m = series(q, 4000);
    CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.second - 1.0 == doctest::Approx(q.sigma2()).epsilon(1e-9));
    CHECK(q.z_max() == doctest::Approx(1.0 / r));
    CHECK(q.tail_class() == TailClass::kExponential);
  }
}

TEST_CASE("zeta law is critical with a polynomial tail") {
  const auto q = OffspringDist::zeta(2.0);
  const Moments m = series(q, 200000);
  CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(q.prob(0) == doctest::Approx(q.prob(1)));
  CHECK(q.prob(10) / q.prob(20) == doctest::Approx(std::pow(2.0, 3.5)));
  CHECK(q.tail_class() == TailClass::kPolynomial);
  CHECK_THROWS(OffspringDist::zeta(1.2));
}

TEST_CASE("pgf excess is accurate near one") {
  for (const auto& q : {OffspringDist::binary(), OffspringDist::geometric(0.4),
                        OffspringDist::table({{0, 0.3}, {1, 0.4}, {2, 0.3}})}) {
    for (double y : {-0.9, -0.3, -1e-3, 1e-3, 0.2}) {
      CHECK(q.pgf_excess(y) == doctest::Approx(q.pgf(1.0 + y) - 1.0).epsilon(1e-9));
    }
    // Linearization: Phi(1+y) - 1 = y + sigma^2 y^2 / 2 + O(y^3).
    const double y = 1e-7;
    CHECK(q.pgf_excess(-y) == doctest::Approx(-y + 0.5 * q.sigma2() * y * y).epsilon(1e-12));
  }
}

TEST_CASE("sampling reproduces mean and variance") {
  for (const char* spec : {"binary", "geometric:0.5", "table:0=0.25,1=0.5,2=0.25", "zeta:3"}) {
    const auto q = OffspringDist::parse(spec);
    Rng rng = make_stream(11, Stream::kSelfTest, 1);
    const int reps = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < reps; ++i) {
      const double x = static_cast<double>(q.sample(rng));
      s += x;
      s2 += x * x;
    }
    const double mean = s / reps;
    const double var = s2 / reps - mean * mean;
    INFO(spec);
    CHECK(std::abs(mean - 1.0) < 5.0 * std::sqrt(q.sigma2() / reps));
    CHECK(var == doctest::Approx(q.sigma2()).epsilon(0.1));
  }
}

TEST_CASE("geometric tail sampling beyond the table") {
  const auto q = OffspringDist::geometric(0.9);
  Rng rng = make_stream(3, Stream::kSelfTest, 2);
  const int reps = 400000;
  const std::int64_t cut = 60;
  int above = 0;
  for (int i = 0; i < reps; ++i) above += q.sample(rng) > cut ? 1 : 0;
  // P(X > L) = (1-r) r^L for L >= 0.
  const double p = 0.1 * std::pow(0.9, cut);
  CHECK(std::abs(above - reps * p) < 5.0 * std::sqrt(reps * p));
}

TEST_CASE("sums of offspring counts") {
  const auto q = OffspringDist::binary();
  Rng rng = make_stream(5, Stream::kSelfTest, 3);
  const int reps = 20000;
  double s = 0.0;
  for (int i = 0; i < reps; ++i) {
    const auto v = sample_offspring_sum(q, 100, rng);
    CHECK(v % 2 == 0);
    s += static_cast<double>(v);
  }
  CHECK(std::abs(s / reps - 100.0) < 5.0 * std::sqrt(100.0 / reps));
  CHECK(q.sample_sum(0, rng) == 0);
}

TEST_CASE("parser and validation") {
  CHECK(OffspringDist::parse("binary").is_binary());
  CHECK(OffspringDist::parse("geometric:0.3").sigma2() == doctest::Approx(0.6 / 0.7));
  CHECK_THROWS(OffspringDist::parse("poisson"));
  CHECK_THROWS(OffspringDist::parse("geometric:1.5"));
  CHECK_THROWS(OffspringDist::parse("table:0=0.5,3=0.5"));   // mean 1.5
  CHECK_THROWS(OffspringDist::parse("table:1=1"));           // degenerate
  CHECK_THROWS(OffspringDist::parse("table:0=0.4,2=0.4"));   // mass 0.8
}

TEST_CASE("occupancy exponent constant") {
  const auto q = OffspringDist::binary();
  CHECK(max_occupancy_delta(q, 2) == doctest::Approx(1.0 / (2.0 * std::log(50.0))));
  CHECK(max_occupancy_delta(q, 3) == doctest::Approx(1.0 / (2.0 * std::log(98.0))));
}
