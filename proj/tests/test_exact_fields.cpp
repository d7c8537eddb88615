#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brw/exact_fields.hpp"

using namespace brw;

namespace {

const OffspringDist kBinary = OffspringDist::binary();

Site s2(int a, int b) { return Site(a, b, 0); }

double max_abs_diff(const Field& a, const Field& b) {
  const int r = std::max(a.radius(), b.radius());
  double m = 0.0;
  Field::for_each_in_box(a.dim(), r, [&](const Site& x) { m = std::max(m, std::abs(a(x) - b(x))); });
  return m;
}

}  // namespace

TEST_CASE("survival probabilities") {
  CHECK(survival_prob(kBinary, 0) == 1.0);
  CHECK(survival_prob(kBinary, 1) == doctest::Approx(0.5));
  CHECK(survival_prob(kBinary, 2) == doctest::Approx(3.0 / 8.0));
  // s_{k+1} = s_k - s_k^2 / 2 for double-or-nothing.
  double s = 1.0;
  const auto seq = survival_sequence(kBinary, 300);
  for (int k = 1; k <= 300; ++k) {
    s -= 0.5 * s * s;
    CHECK(seq[k] == doctest::Approx(s).epsilon(1e-13));
  }
  const double ns = 10000 * survival_prob(kBinary, 10000);
  CHECK(ns >= 1.85);
  CHECK(ns <= 2.0);
  const auto g = OffspringDist::geometric(0.5);
  CHECK(10000 * survival_prob(g, 10000) == doctest::Approx(2.0 / g.sigma2()).epsilon(0.02));
}

TEST_CASE("hitting probabilities: hand values") {
  const Field u1 = hitting_field(kBinary, 1, 2);
  for (const Site& e : neighborhood(2)) CHECK(u1(e) == doctest::Approx(9.0 / 50.0));
  CHECK(u1(s2(1, 1)) == 0.0);
  const Field u2 = hitting_field(kBinary, 2, 2);
  CHECK(u2(Site::Zero()) == doctest::Approx(0.1638).epsilon(1e-12));
}

TEST_CASE("kpp and pgf forms of the hitting recursion coincide") {
  Field a = Field::delta(2);
  Field b = Field::delta(2);
  double worst = 0.0;
  for (int n = 1; n <= 64; ++n) {
    a = hitting_step(kBinary, a);
    b = kpp_step(b);
    worst = std::max(worst, max_abs_diff(a, b));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("hitting probabilities are dominated by the survival probability") {
  const Field u = hitting_field(kBinary, 20, 2);
  CHECK(u.values().maxCoeff() <= survival_prob(kBinary, 20) + 1e-15);
  CHECK(u.values().minCoeff() >= 0.0);
}

TEST_CASE("pmf oracle: hand values at n = 1") {
  const PmfField pmf = pmf_oracle(kBinary, 1, 2, 8);
  for (const Site& e : neighborhood(2)) {
    const Eigen::ArrayXd p = pmf.pmf(e);
    CHECK(p(0) == doctest::Approx(41.0 / 50.0));
    CHECK(p(1) == doctest::Approx(8.0 / 50.0));
    CHECK(p(2) == doctest::Approx(1.0 / 50.0));
  }
  const Eigen::ArrayXd far = pmf.pmf(s2(3, 0));
  CHECK(far(0) == 1.0);
}

TEST_CASE("pmf oracle moments against the linear recursions") {
  for (int n : {2, 5, 9}) {
    const PmfField pmf = pmf_oracle(kBinary, n, 2);
    CHECK(pmf.max_truncated_mass() < 1e-9);
    CHECK(max_abs_diff(pmf.mean_field(), transition_field(n, 2)) < 1e-9);
    CHECK(max_abs_diff(pmf.hit_field(), hitting_field(kBinary, n, 2)) < 1e-9);
    CHECK(max_abs_diff(pmf.second_moment_field(), second_moment_field(kBinary, n, 2)) < 1e-8);
    for (Eigen::Index i = 0; i < pmf.probs().rows(); ++i) {
      CHECK(pmf.probs().row(i).sum() + pmf.truncated_mass()(i) >= 1.0 - 1e-12);
    }
  }
  const auto tri = OffspringDist::parse("table:0=0.3,1=0.4,2=0.3");
  const PmfField p3 = pmf_oracle(tri, 4, 3);
  CHECK(max_abs_diff(p3.mean_field(), transition_field(4, 3)) < 1e-9);
  CHECK(max_abs_diff(p3.second_moment_field(), second_moment_field(tri, 4, 3)) < 1e-8);
}

TEST_CASE("second moment hand value and scalar identity") {
  const Field f1 = second_moment_field(kBinary, 1, 2);
  for (const Site& e : neighborhood(2)) CHECK(f1(e) == doctest::Approx(6.0 / 25.0));
  for (int d : {2, 3}) {
    Field p = Field::delta(d);
    double acc = 0.0;
    for (int n = 1; n <= 40; ++n) {
      p = apply_markov(p);
      acc += (p.values() * p.values()).sum();  // sum_x P_n(x)^2 = P_2n(0)
      const Field f = second_moment_field(kBinary, n, d);
      CHECK(f.sum() == doctest::Approx(1.0 + acc).epsilon(1e-12));
    }
  }
}

TEST_CASE("mgf recursion and its linear dominating field") {
  const double theta = 0.1;
  const Field g1 = mgf_field(kBinary, 1, theta, 2);
  for (const Site& e : neighborhood(2)) {
    // E exp(theta U_1(e)) - 1 from the n = 1 pmf.
    const double expect = (41.0 + 8.0 * std::exp(theta) + std::exp(2 * theta)) / 50.0 - 1.0;
    CHECK(g1(e) == doctest::Approx(expect).epsilon(1e-13));
  }
  for (int n : {1, 4, 12}) {
    const Field g = mgf_field(kBinary, n, theta, 2);
    const Field h = dominating_field(kBinary, n, theta, 2);
    const Field hc = dominating_field_closed(kBinary, n, theta, 2);
    CHECK(max_abs_diff(h, hc) < 1e-12);
    Field::for_each_in_box(2, n, [&](const Site& x) { CHECK(g(x) <= h(x) + 1e-14); });
  }
  // Exact moment generating function from the oracle pmf.
  const PmfField pmf = pmf_oracle(kBinary, 4, 2);
  const Field g4 = mgf_field(kBinary, 4, theta, 2);
  for (const Site& x : {s2(0, 0), s2(1, 0), s2(2, 1)}) {
    const Eigen::ArrayXd p = pmf.pmf(x);
    double m = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) m += p(k) * std::exp(theta * k);
    CHECK(g4(x) == doctest::Approx(m - 1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(mgf_field(OffspringDist::geometric(0.5), 60, 2.0, 2), MgfBlowup);
}

TEST_CASE("mean occupied sites") {
  const auto m = mean_occupied(kBinary, 3, 2);
  CHECK(m.value == doctest::Approx(hitting_field(kBinary, 3, 2).sum()));
  CHECK(m.tail_bound == 0.0);
}

TEST_CASE("orthant monotonicity") {
  CHECK(max_orthant_violation(transition_field(30, 2)) <= 1e-12);
  CHECK(max_orthant_violation(hitting_field(kBinary, 30, 2)) <= 1e-12);
  CHECK(max_orthant_violation(transition_field(12, 3)) <= 1e-12);
  // A bump away from the origin is detected.
  Field f(2, 3);
  f.at(s2(2, 1)) = 1.0;
  CHECK(max_orthant_violation(f) == doctest::Approx(1.0));
}

TEST_CASE("super-solution margin matches direct evaluation") {
  const SuperSolutionParams params{4.0 * std::exp(15.0)};
  CHECK(SuperSolutionParams::kappa0() == doctest::Approx(4.0 * std::exp(15.0)));
  for (int n : {20, 50}) {
    for (const Site& x : {s2(0, 0), s2(3, 1), s2(n, 0), s2(2 * n, n)}) {
      double pv = 0.0;
      for (const Site& e : neighborhood(2)) pv += supersolution_value(params, n, x - e) / 5.0;
      const double rhs = pv * (1.0 - pv / 2.0);
      const double lhs = supersolution_value(params, n + 1, x);
      if (pv < 2.0) {
        CHECK(supersolution_margin(params, n, x) ==
              doctest::Approx(std::log(lhs) - std::log(rhs)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("super-solution search and comparison") {
  const SuperSolutionParams params{SuperSolutionParams::kappa0()};
  const auto n0 = find_supersolution_n0(params, 64);
  REQUIRE(n0.has_value());
  const auto rep = verify_supersolution(params, *n0, 4 * *n0);
  CHECK(rep.holds);
  CHECK(rep.min_margin > 0.0);
  const int n1 = find_comparison_shift(*n0, params.kappa);
  CHECK(n1 * std::log(n1) >= params.kappa);
  CHECK((n1 - 1) * std::log(n1 - 1.0) < params.kappa);
  const SuperSolutionParams shifted{n1 * std::log(static_cast<double>(n1))};
  const auto cmp = verify_supersolution_dominates(shifted, n1, 40);
  CHECK(cmp.hypotheses_ok);
  CHECK(cmp.holds);
}

TEST_CASE("comparison checker flags a dominated candidate") {
  std::vector<Field> u, v;
  Field cur = Field::delta(2);
  for (int k = 0; k <= 4; ++k) {
    u.push_back(cur);
    v.push_back(Field::constant(2, k + 1, 1e-3));
    cur = kpp_step(cur);
  }
  ComparisonReport rep;
  CHECK_FALSE(verify_comparison(u, v, &rep));
  CHECK(rep.first_violation_n == 0);
}
