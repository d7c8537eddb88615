#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brw/conditioned_rep.hpp"
#include "brw/exact_fields.hpp"
#include "brw/stats.hpp"

using namespace brw;

namespace {

Site s2(int a, int b) { return Site(a, b, 0); }

// Conditional pmf of U_n(x) given U_n(x) >= 1, indexed by k - 1.
std::vector<double> conditional_pmf(const PmfField& pmf, const Site& x) {
  const Eigen::ArrayXd p = pmf.pmf(x);
  std::vector<double> out;
  for (Eigen::Index k = 1; k < p.size(); ++k) out.push_back(p(k) / (1.0 - p(0)));
  return out;
}

}  // namespace

TEST_CASE("first step is forced at n = 1") {
  const UFieldBank bank(1, 2);
  const auto nb = neighborhood(2);
  for (const Site& x : nb) {
    const auto row = utransform_row(bank, 1, Site::Zero(), x);
    for (std::size_t i = 0; i < nb.size(); ++i) CHECK(row[i] == (nb[i] == x ? 1.0 : 0.0));
    CHECK(beta_m(bank, 0, Site::Zero(), x) == doctest::Approx(5.0 / 9.0));
  }
  CHECK_THROWS_AS(utransform_row(bank, 1, Site::Zero(), s2(1, 1)), std::domain_error);
}

TEST_CASE("n = 1 law is one plus a Bernoulli(1/9)") {
  const UFieldBank bank(1, 2);
  const auto draws = sample_conditioned_batch(bank, s2(0, 1), 90000, 3);
  std::int64_t twos = 0;
  for (const auto& d : draws) {
    CHECK((d.value == 1 || d.value == 2));
    twos += d.value == 2;
  }
  CHECK(std::abs(twos - 10000.0) < 4.0 * std::sqrt(90000.0 / 9.0 * 8.0 / 9.0));
}

TEST_CASE("rows are stochastic and symmetric") {
  const UFieldBank bank(8, 2);
  const auto nb = neighborhood(2);
  Rng rng = make_stream(1, Stream::kSelfTest, 0);
  const Site x = s2(2, 2);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int m = 1 + static_cast<int>(uniform01(rng) * 8);
    const Site z = s2(static_cast<int>(uniform01(rng) * 7) - 3, static_cast<int>(uniform01(rng) * 7) - 3);
    if (!(bank.u(8 - m + 1)(x - z) > 0.0)) continue;
    const auto row = utransform_row(bank, m, z, x);
    double s = 0.0;
    for (double q : row) s += q;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    ++checked;
    // Swapping coordinates of z and x permutes the row: -e1<->-e2, +e1<->+e2.
    const Site zs(z(1), z(0), 0);
    const auto rs = utransform_row(bank, m, zs, x);
    CHECK(rs[0] == doctest::Approx(row[0]).epsilon(1e-14));
    CHECK(rs[1] == doctest::Approx(row[3]).epsilon(1e-14));
    CHECK(rs[2] == doctest::Approx(row[4]).epsilon(1e-14));
  }
  CHECK(checked > 50);
  (void)nb;
}

TEST_CASE("u-transform differs from the pinned walk") {
  // u_1 is proportional to P_1 on its support, so the rows first differ
  // three generations before the target.
  const UFieldBank bank(4, 2);
  double worst = 0.0;
  for (const Site& x : {s2(0, 0), s2(1, 0), s2(1, 1), s2(2, 0)}) {
    const auto a = utransform_row(bank, 1, Site::Zero(), x);
    const auto b = pinned_row(4, 1, Site::Zero(), x);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  CHECK(worst > 1e-6);
}

TEST_CASE("conditional law matches the exact pmf") {
  const int reps = 100000;
  for (int n : {2, 3, 4}) {
    const UFieldBank bank(n, 2);
    const PmfField pmf = pmf_oracle(OffspringDist::binary(), n, 2);
    for (const Site& x : {s2(0, 0), s2(1, 0), s2(1, 1)}) {
      const auto probs = conditional_pmf(pmf, x);
      const auto draws = sample_conditioned_batch(bank, x, reps, 100 + n);
      std::vector<std::int64_t> hist(probs.size() + 1, 0);
      std::vector<double> vals;
      for (const auto& d : draws) {
        ++hist[std::min<std::size_t>(d.value - 1, hist.size() - 1)];
        vals.push_back(static_cast<double>(d.value));
      }
      const auto chi = chi_square(hist, probs);
      INFO("n=" << n << " x=" << x.transpose() << " p=" << chi.p_value);
      CHECK(chi.p_value > 1e-3);
      // Conditional mean P_n(x) / u_n(x).
      const EstimateCI e = estimate(vals);
      const double mean = transition_field(n, 2)(x) / bank.u(n)(x);
      CHECK(std::abs(e.mean - mean) < 4.0 * e.std_error);
    }
  }
}

TEST_CASE("endpoint audit") {
  for (int n : {1, 5, 16}) {
    const UFieldBank bank(n, 2);
    std::vector<Site> targets;
    for (int a = 0; a <= std::min(n, 3); ++a) targets.push_back(s2(a, n > 4 ? 1 : 0));
    const EndpointAudit audit = endpoint_audit(bank, targets, 300, 9);
    CHECK(audit.violations == 0);
    CHECK(audit.paths == 300 * static_cast<std::int64_t>(targets.size()));
    CHECK(audit.max_row_error < 1e-12);
  }
  const UFieldBank bank(3, 2);
  CHECK_THROWS_AS(endpoint_audit(bank, {s2(4, 0)}, 10, 1), std::domain_error);
}
