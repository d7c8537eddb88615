#include "brw/verify.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "brw/conditioned_rep.hpp"
#include "brw/exact_fields.hpp"
#include "brw/forward_sim.hpp"
#include "brw/parallel.hpp"
#include "brw/spine_sim.hpp"

namespace brw {
namespace {

const OffspringDist& binary_law() {
  static const OffspringDist law = OffspringDist::binary();
  return law;
}

const std::string kBin = "binary";

Site s2(int a, int b) { return Site(a, b, 0); }

// splitmix64 finalizer: decorrelates the per-criterion master seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::int64_t scaled(const VerifyOptions& o, std::int64_t base, std::int64_t floor = 100) {
  return std::max<std::int64_t>(floor, std::llround(static_cast<double>(base) * o.scale));
}

double max_abs_diff(const Field& a, const Field& b) {
  const int r = std::max(a.radius(), b.radius());
  double m = 0.0;
  Field::for_each_in_box(a.dim(), r, [&](const Site& x) { m = std::max(m, std::abs(a(x) - b(x))); });
  return m;
}

bool within_se(double est, double se, double target, double k = tol::kSeBand) {
  return std::abs(est - target) <= k * se;
}

// log C(n, k)
long double log_binom(int n, int k) {
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1);
}

// P_n(0) of the lazy walk from multinomial path counts: choose the 2m moving
// steps, then count closed simple walks of length 2m. In the plane these
// number C(2m,m)^2; in space C(2m,m) sum_k C(m,k)^2 C(2k,k).
class ReturnProbabilities {
 public:
  ReturnProbabilities(int dim, int n_max) : dim_(dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("return probabilities for d = 2, 3");
    log_closed_.resize(n_max / 2 + 1);
    for (int m = 0; m <= n_max / 2; ++m) {
      if (dim == 2) {
        log_closed_[m] = 2 * log_binom(2 * m, m);
      } else {
        long double mx = -INFINITY;
        std::vector<long double> t(m + 1);
        for (int k = 0; k <= m; ++k) {
          t[k] = 2 * log_binom(m, k) + log_binom(2 * k, k);
          mx = std::max(mx, t[k]);
        }
        long double s = 0;
        for (long double v : t) s += std::exp(v - mx);
        log_closed_[m] = log_binom(2 * m, m) + mx + std::log(s);
      }
    }
  }

  double operator()(int n) const {
    const long double log_stencil = std::log(static_cast<long double>(2 * dim_ + 1));
    long double s = 0;
    for (int m = 0; 2 * m <= n; ++m) {
      s += std::exp(log_binom(n, 2 * m) + log_closed_[m] - n * log_stencil);
    }
    return static_cast<double>(s);
  }

 private:
  int dim_;
  std::vector<long double> log_closed_;
};

struct Check {
  CriterionResult& res;
  int d = 2;
  void row(const std::string& stat, int n, double value, const std::string& band, bool pass,
           int dim = -1) {
    res.rows.push_back({"c" + std::to_string(res.id), n, dim < 0 ? d : dim, kBin, stat, value,
                        band, pass});
  }
};

// Conditioned forward runs (survival to n) in replicate order.
std::vector<GenStats> conditioned_runs(int n, int dim, std::int64_t reps, std::uint64_t seed) {
  return map_replicates(reps, [&](std::int64_t r) {
    Rng rng = make_stream(seed, Stream::kConditioned, static_cast<std::uint64_t>(r));
    return run_conditioned(binary_law(), n, dim, rng, RunOptions{false, false}).stats;
  });
}

// ---------------------------------------------------------------------------

void c1(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const PmfField pmf = pmf_oracle(binary_law(), n, 2);
    const double e = max_abs_diff(pmf.mean_field(), transition_field(n, 2));
    worst = std::max(worst, e);
    ck.row("max|E_pmf U - P_n|", n, e, "<= 1e-9", e <= tol::kFieldExact);
  }
  const int n = 32;
  const Site x = s2(1, 0);
  const std::uint64_t seed = derive_seed(o.seed, 1);
  const auto v = map_replicates(scaled(o, 200000), [&](std::int64_t r) {
    Rng rng = make_stream(seed, Stream::kForward, static_cast<std::uint64_t>(r));
    return static_cast<double>(evolve(binary_law(), n, 2, rng).count_at(x));
  });
  const EstimateCI e = estimate(v);
  const double p = transition_field(n, 2)(x);
  const bool mc = within_se(e.mean, e.std_error, p);
  ck.row("mean U_32(1,0) - P_32(1,0)", n, e.mean - p, "|.| <= 3 SE = " + num(3 * e.std_error), mc);
  res.pass = worst <= tol::kFieldExact && mc;
  res.detail = "max pmf-mean error " + num(worst) + "; MC U_32(1,0) " + num(e.mean) + " vs " +
               num(p) + " (SE " + num(e.std_error) + ")";
}

void c2(CriterionResult& res, const VerifyOptions&) {
  Check ck{res};
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const PmfField pmf = pmf_oracle(binary_law(), n, 2);
    const double e = max_abs_diff(pmf.hit_field(), hitting_field(binary_law(), n, 2));
    worst = std::max(worst, e);
    ck.row("max|1-p0 - u_n|", n, e, "<= 1e-9", e <= tol::kFieldExact);
  }
  Field a = Field::delta(2), b = Field::delta(2);
  double kpp = 0.0;
  for (int n = 1; n <= 256; ++n) {
    a = hitting_step(binary_law(), a);
    b = kpp_step(b);
    kpp = std::max(kpp, max_abs_diff(a, b));
  }
  ck.row("max|u_pgf - u_kpp| n<=256", 256, kpp, "<= 1e-12", kpp <= tol::kKppAgreement);
  res.pass = worst <= tol::kFieldExact && kpp <= tol::kKppAgreement;
  res.detail = "max pmf-hit error " + num(worst) + "; kpp/pgf gap " + num(kpp);
}

void c3(CriterionResult& res, const VerifyOptions&) {
  Check ck{res};
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const PmfField pmf = pmf_oracle(binary_law(), n, 2);
    const double e = max_abs_diff(pmf.second_moment_field(), second_moment_field(binary_law(), n, 2));
    worst = std::max(worst, e);
    ck.row("max|E_pmf U^2 - f_n|", n, e, "<= 1e-8", e <= tol::kSecondMoment);
  }
  bool ok = worst <= tol::kSecondMoment;
  std::string detail = "max pmf second-moment error " + num(worst);
  const int n_max = 512;
  for (int d : {2, 3}) {
    const ReturnProbabilities ret(d, 2 * n_max);
    const double c = d == 2 ? 6.0 : kIdentityClampC3;
    const int radius = clamp_radius(n_max, c);
    double acc = 0.0, gap = 0.0, tail = 0.0;
    int argmax = 0;
    for_each_second_moment(binary_law(), n_max, d, radius, [&](int n, const Field& f) {
      acc += ret(2 * n);
      const double e = std::abs(f.sum() - (1.0 + acc));
      if (e > gap) {
        gap = e;
        argmax = n;
      }
      tail = f.tail_bound();
    });
    ck.row("max_n |sum f_n - 1 - sum P_2j(0)|", n_max, gap, "<= 1e-8", gap <= tol::kSecondMoment, d);
    ck.row("dropped mass of f_512", n_max, tail, "reported", true, d);
    ok = ok && gap <= tol::kSecondMoment;
    detail += "; d=" + std::to_string(d) + " identity gap " + num(gap) + " (worst n=" +
              std::to_string(argmax) + ", box radius " + std::to_string(radius) + ")";
  }
  res.pass = ok;
  res.detail = detail;
}

void c4(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  const int n = 256;
  const std::int64_t reps = scaled(o, 1000000);
  const std::uint64_t seed = derive_seed(o.seed, 4);
  const auto alive = map_replicates(reps, [&](std::int64_t r) {
    Rng rng = make_stream(seed, Stream::kPopulation, static_cast<std::uint64_t>(r));
    return run_population(binary_law(), n, rng) > 0 ? 1 : 0;
  });
  std::int64_t k = 0;
  for (int a : alive) k += a;
  const double pi = static_cast<double>(k) / reps;
  const double se = std::sqrt(pi * (1.0 - pi) / reps);
  const double exact = survival_prob(binary_law(), n);
  const bool mc = within_se(n * pi, n * se, n * exact);
  ck.row("n*pi_hat - n*s_n", n, n * (pi - exact), "|.| <= 3 SE = " + num(3 * n * se), mc);
  const int big = 10000;
  const double ns = big * survival_prob(binary_law(), big);
  const bool band = ns >= tol::kKolmogorovLo && ns <= tol::kKolmogorovHi;
  ck.row("n*s_n", big, ns, "[1.85, 2.0]", band);
  res.pass = mc && band;
  res.detail = "n*pi_hat " + num(n * pi) + " vs n*s_n " + num(n * exact) + " (SE " + num(n * se) +
               "); 10^4*s_10^4 = " + num(ns);
}

void c5(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  const int n = 512;
  const std::int64_t reps = scaled(o, 20000);
  const std::uint64_t seed = derive_seed(o.seed, 5);
  const auto z = map_replicates(reps, [&](std::int64_t r) {
    Rng rng = make_stream(seed, Stream::kPopulation, static_cast<std::uint64_t>(r));
    return static_cast<double>(run_population_conditioned(binary_law(), n, rng).Z) / n;
  });
  // E[Z_n | G_n] = 1/s_n exactly, so the limit mean is lim 1/(n s_n) = sigma^2/2.
  const double sigma2 = binary_law().sigma2();
  const double mu = sigma2 / 2.0;
  const double exact_mean = 1.0 / (n * survival_prob(binary_law(), n));
  const EstimateCI e = estimate(z);
  const bool mean_ok = within_se(e.mean, e.std_error, exact_mean);
  const KsResult ks = ks_against_exponential(z, mu);
  const bool ok = ks.D < tol::kKsDistance;
  const KsResult literal = ks_against_exponential(z, 2.0 / sigma2);
  ck.row("mean Z_n/n | G_n", n, e.mean, "1/(n s_n) = " + num(exact_mean) + " +- 3 SE", mean_ok, 0);
  ck.row("KS D(Z_n/n | G_n, Exp(sigma^2/2))", n, ks.D, "< 0.05", ok, 0);
  ck.row("KS asymptotic p", n, ks.p_value, "reported", true, 0);
  ck.row("KS D against Exp(2/sigma^2)", n, literal.D, "reported", true, 0);
  res.pass = ok && mean_ok;
  res.detail = "D = " + num(ks.D) + " vs Exp(mean " + num(mu) + ") over " + std::to_string(reps) +
               " samples (p " + num(ks.p_value) + "); mean " + num(e.mean) + " vs 1/(n s_n) " +
               num(exact_mean) + " (SE " + num(e.std_error) + "); D vs Exp(mean " +
               num(2.0 / sigma2) + ") = " + num(literal.D);
}

void c6(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res, 3};
  const std::int64_t reps = scaled(o, 2000);
  std::map<int, KappaRow> rows;
  for (int n : {128, 256, 512}) {
    const auto runs = conditioned_runs(n, 3, reps, derive_seed(o.seed, 600 + n));
    rows[n] = kappa_estimates(n, runs);
    const KappaRow& k = rows[n];
    ck.row("kappa_1", n, k.kappa[1].mean, "SE " + num(k.kappa[1].std_error), true);
    ck.row("kappa_2", n, k.kappa[2].mean, "SE " + num(k.kappa[2].std_error), true);
    ck.row("sd M(1)/Z", n, k.m1_ratio.sd, "decreasing in n", true);
    ck.row("sum j kappa_j + overflow", n, k.weighted_sum, "|. - 1| <= 0.02",
           std::abs(k.weighted_sum - 1.0) <= tol::kKappaSum);
  }
  bool nonneg = true;
  for (const auto& [n, k] : rows)
    for (std::size_t j = 1; j < k.kappa.size(); ++j) nonneg = nonneg && k.kappa[j].mean >= 0.0;
  const double sum_gap = std::abs(rows[512].weighted_sum - 1.0);
  const double stab = std::abs(rows[512].kappa[1].mean / rows[256].kappa[1].mean - 1.0);
  const bool sd_dec = rows[128].m1_ratio.sd > rows[256].m1_ratio.sd &&
                      rows[256].m1_ratio.sd > rows[512].m1_ratio.sd;
  ck.row("|kappa_1(512)/kappa_1(256) - 1|", 512, stab, "<= 0.05", stab <= tol::kKappaStability);
  ck.row("sd M(1)/Z decreasing", 512, sd_dec ? 1.0 : 0.0, "128 > 256 > 512", sd_dec);
  res.pass = sum_gap <= tol::kKappaSum && stab <= tol::kKappaStability && sd_dec && nonneg;
  res.detail = "sum gap " + num(sum_gap) + "; kappa_1 " + num(rows[256].kappa[1].mean) + " -> " +
               num(rows[512].kappa[1].mean) + " (rel " + num(stab) + "); sd " +
               num(rows[128].m1_ratio.sd) + ", " + num(rows[256].m1_ratio.sd) + ", " +
               num(rows[512].m1_ratio.sd);
}

void c7(CriterionResult& res, const VerifyOptions& o) {
  const std::int64_t reps = scaled(o, 1000);
  bool ok = true;
  std::string detail;
  for (int d : {3, 2}) {
    std::map<int, std::vector<double>> v;
    for (int n : {128, 256, 512, 1024}) {
      for (const auto& s : conditioned_runs(n, d, reps, derive_seed(o.seed, 700 + 10 * n + d))) {
        v[n].push_back(static_cast<double>(s.V));
      }
    }
    auto norm = d == 3 ? std::function<double(int)>([](int n) { return std::log(n); })
                       : std::function<double(int)>([](int n) { return std::pow(std::log(n), 2); });
    const auto t = tightness_table(v, norm, tol::kTightnessRatio, "c7", d, kBin,
                                   d == 3 ? "V/ln n" : "V/ln^2 n");
    res.rows.insert(res.rows.end(), t.rows.begin(), t.rows.end());
    ok = ok && t.pass;
    detail += (detail.empty() ? "" : "; ") + std::string("d=") + std::to_string(d) +
              " q90 ratio " + num(t.ratio);
  }
  res.pass = ok;
  res.detail = detail;
}

void c8(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  const std::int64_t reps = scaled(o, 1000000);
  struct Case {
    const char* name;
    int n;
    std::function<double(const GenStats&)> f;
  };
  const std::vector<Case> cases = {
      {"1{Z_2=2}", 2, [](const GenStats& s) { return s.Z == 2 ? 1.0 : 0.0; }},
      {"1{Z_2=4}", 2, [](const GenStats& s) { return s.Z == 4 ? 1.0 : 0.0; }},
      {"Z_3", 3, [](const GenStats& s) { return static_cast<double>(s.Z); }},
  };
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const SizeBiasCheck r = sizebias_check(c.f, c.n, 2, reps, derive_seed(o.seed, 80 + i));
    const bool zok = std::abs(r.z) < tol::kSizeBiasZ;
    ck.row(std::string("z ") + c.name, c.n, r.z, "|z| < 4", zok);
    ok = ok && zok;
    detail += std::string(detail.empty() ? "" : "; ") + c.name + " z=" + num(r.z);
    if (i < 2) {
      const bool hv = within_se(r.lhs, r.lhs_se, 0.5);
      ck.row(std::string("P_H ") + c.name, c.n, r.lhs, "|. - 1/2| <= 3 SE = " + num(3 * r.lhs_se), hv);
      ok = ok && hv;
      detail += " P_H=" + num(r.lhs);
    }
  }
  res.pass = ok;
  res.detail = detail;
}

void c9(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  SpineBatchConfig cfg;
  cfg.n = 512;
  cfg.dim = 2;
  cfg.reps = scaled(o, 10000);
  cfg.seed = derive_seed(o.seed, 9);
  const auto samples = sample_gamma_delta(cfg);
  std::vector<double> t;
  std::int64_t misses = 0;
  for (const auto& s : samples) {
    t.push_back(static_cast<double>(s.t_star));
    misses += s.clamp_misses;
  }
  const EstimateCI e = estimate(t);
  const double g512 = exact_mean_gamma(512, 2);
  const double target = 1.2 + g512;
  const bool mean_ok = within_se(e.mean, e.std_error, target);
  ck.row("mean T** - 1.2 - Gamma(512)", 512, e.mean - target, "|.| <= 3 SE = " + num(3 * e.std_error), mean_ok);
  ck.row("clamp misses", 512, static_cast<double>(misses), "reported", true);
  const double g1024 = exact_mean_gamma(1024, 2);
  const double slope = (g1024 - g512) / std::log(2.0);
  const double growth = std::abs(slope - 5.0 / (8.0 * M_PI));
  const bool growth_ok = growth < tol::kGammaGrowth;
  ck.row("(Gamma(1024)-Gamma(512))/ln2 - 5/(8pi)", 1024, slope - 5.0 / (8.0 * M_PI), "|.| < 0.01", growth_ok);
  res.pass = mean_ok && growth_ok;
  res.detail = "mean T** " + num(e.mean) + " vs " + num(target) + " (SE " + num(e.std_error) +
               "); growth slope " + num(slope) + " vs " + num(5.0 / (8.0 * M_PI));
}

void c10(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  // n = 1: the law of the representation is 1 + B_0(0) 1{xi_1 = x}.
  const UFieldBank bank1(1, 2);
  const PmfField pmf1 = pmf_oracle(binary_law(), 1, 2);
  double law_gap = 0.0;
  for (const Site& x : neighborhood(2)) {
    const double rep2 = beta_m(bank1, 0, Site::Zero(), x) / 5.0;
    const Eigen::ArrayXd p = pmf1.pmf(x);
    const double ora2 = p(2) / (1.0 - p(0));
    law_gap = std::max({law_gap, std::abs(rep2 - 1.0 / 9.0), std::abs(ora2 - 1.0 / 9.0),
                        std::abs(p(1) / (1.0 - p(0)) - 8.0 / 9.0)});
  }
  const bool law_ok = law_gap <= 1e-15;
  ck.row("n=1 law vs 1+Bernoulli(1/9)", 1, law_gap, "<= 1e-15", law_ok);
  bool ok = law_ok;
  std::string detail = "n=1 law gap " + num(law_gap);

  const std::int64_t reps = scaled(o, 100000);
  for (int n : {2, 3}) {
    const UFieldBank bank(n, 2);
    const PmfField pmf = pmf_oracle(binary_law(), n, 2);
    const Site x = s2(1, 0);
    const Eigen::ArrayXd p = pmf.pmf(x);
    std::vector<double> probs;
    for (Eigen::Index k = 1; k < p.size(); ++k) probs.push_back(p(k) / (1.0 - p(0)));
    const auto draws = sample_conditioned_batch(bank, x, reps, derive_seed(o.seed, 100 + n));
    std::vector<std::int64_t> hist(probs.size() + 1, 0);
    for (const auto& d : draws) ++hist[std::min<std::size_t>(d.value - 1, hist.size() - 1)];
    const ChiSquareResult chi = chi_square(hist, probs);
    const bool cok = chi.p_value > tol::kChiSquareP;
    ck.row("chi-square p vs oracle", n, chi.p_value, "> 0.01", cok);
    ok = ok && cok;
    detail += "; n=" + std::to_string(n) + " chi2 p " + num(chi.p_value);
  }

  std::int64_t violations = 0, paths = 0;
  double row_err = 0.0;
  Rng pick = make_stream(derive_seed(o.seed, 110), Stream::kSelfTest, 0);
  const std::int64_t per_target = scaled(o, 1000, 10);
  for (int n = 1; n <= 32; ++n) {
    const UFieldBank bank(n, 2);
    std::vector<Site> reachable;
    Field::for_each_in_box(2, n, [&](const Site& x) {
      if (bank.u(n)(x) > 0.0) reachable.push_back(x);
    });
    std::vector<Site> targets;
    for (int t = 0; t < 50; ++t) {
      targets.push_back(reachable[static_cast<std::size_t>(uniform01(pick) * reachable.size())]);
    }
    const EndpointAudit a = endpoint_audit(bank, targets, per_target, derive_seed(o.seed, 200 + n));
    violations += a.violations;
    paths += a.paths;
    row_err = std::max(row_err, a.max_row_error);
  }
  ck.row("endpoint violations n<=32", 32, static_cast<double>(violations), "== 0", violations == 0);
  ck.row("max |row sum - 1|", 32, row_err, "<= 1e-12", row_err <= 1e-12);
  ok = ok && violations == 0 && row_err <= 1e-12;
  res.pass = ok;
  res.detail = detail + "; " + std::to_string(violations) + " endpoint misses in " +
               std::to_string(paths) + " paths";
}

void c11(CriterionResult& res, const VerifyOptions&) {
  Check ck{res};
  const SuperSolutionParams params{super_kappa()};
  const auto n0 = find_supersolution_n0(params, 64);
  if (!n0) {
    ck.row("N0 found", 0, 0.0, "exists <= 64", false);
    res.pass = false;
    res.detail = "no N0 <= 64 makes the inequality hold on [N0, 4N0]";
    return;
  }
  const SupersolutionReport rep = verify_supersolution(params, *n0, 4 * *n0);
  ck.row("min margin on [N0,4N0], |x|<=3n", *n0, rep.min_margin, "> 0", rep.holds);
  const int n1 = find_comparison_shift(*n0, params.kappa);
  const SuperSolutionParams shifted{n1 * std::log(static_cast<double>(n1))};
  const ComparisonReport cmp = verify_supersolution_dominates(shifted, n1, 512);
  ck.row("u_n <= v_{N1+n}, n<=512", n1, cmp.max_excess, "<= 0 and hypotheses hold",
         cmp.holds && cmp.hypotheses_ok);
  res.pass = rep.holds && cmp.holds && cmp.hypotheses_ok;
  res.detail = "N0 = " + std::to_string(*n0) + ", min margin " + num(rep.min_margin) + " at n=" +
               std::to_string(rep.argmin_n) + "; N1 = " + std::to_string(n1) +
               ", comparison " + (cmp.holds && cmp.hypotheses_ok ? "holds" : "fails: " + cmp.detail);
}

void c12(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  std::map<int, double> scaled_mean;
  Field u = Field::delta(2);
  for (int n = 1; n <= 512; ++n) {
    u = hitting_step(binary_law(), u);
    if (n == 128 || n == 256 || n == 512) {
      scaled_mean[n] = u.sum() * std::log(n);
      ck.row("sum u_n * ln n", n, scaled_mean[n], "factor 2 across grid", true);
    }
  }
  double lo = INFINITY, hi = 0.0;
  for (const auto& [n, v] : scaled_mean) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double ratio = hi / lo;
  const bool mean_ok = ratio <= tol::kScalingFactor;
  ck.row("max/min sum u_n ln n", 512, ratio, "<= 2", mean_ok);

  const std::int64_t reps = scaled(o, 1000);
  std::map<int, std::vector<double>> omega;
  for (int n : {128, 256, 512}) {
    for (const auto& s : conditioned_runs(n, 2, reps, derive_seed(o.seed, 1200 + n))) {
      omega[n].push_back(static_cast<double>(s.Omega));
    }
  }
  const auto t = tightness_table(omega, [](int n) { return n / std::log(n); },
                                 tol::kScalingFactor, "c12", 2, kBin, "Omega ln n/n");
  res.rows.insert(res.rows.end(), t.rows.begin(), t.rows.end());
  res.pass = mean_ok && t.pass;
  res.detail = "unconditional ratio " + num(ratio) + "; conditional q90 ratio " + num(t.ratio);
}

void c13(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  const std::int64_t reps = scaled(o, 400);
  std::map<int, double> frac;
  bool band_ok = true;
  std::string detail;
  for (int n : {128, 256, 512, 1024}) {
    const int ell = static_cast<int>(std::ceil(std::log(n)));
    const std::uint64_t seed = derive_seed(o.seed, 1300 + n);
    const auto balls = map_replicates(reps, [&](std::int64_t r) {
      Rng rng = make_stream(seed, Stream::kSpine, static_cast<std::uint64_t>(r));
      return sample_ball(n, ell, 2, rng);
    });
    std::vector<double> f, w;
    for (const auto& b : balls) {
      f.push_back(static_cast<double>(b.unoccupied) / static_cast<double>(b.sites));
      w.push_back(static_cast<double>(b.W) / (M_PI * ell * ell * std::log(n)));
    }
    frac[n] = estimate(f).mean;
    const double q = quantile(w, 0.9);
    const bool in = q >= tol::kBallQ90Lo && q <= tol::kBallQ90Hi;
    band_ok = band_ok && in;
    ck.row("mean unoccupied fraction, ell=" + std::to_string(ell), n, frac[n], "decreasing", true);
    ck.row("q90 W/(pi ell^2 ln n)", n, q, "[0.02, 2.0]", in);
    detail += (detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " frac " +
              num(frac[n]) + " q90 " + num(q);
  }
  const bool dec = frac[1024] < frac[128];
  ck.row("unoccupied fraction 1024 < 128", 1024, frac[1024] - frac[128], "< 0", dec);
  res.pass = dec && band_ok;
  res.detail = detail;
}

void c14(CriterionResult& res, const VerifyOptions& o) {
  Check ck{res};
  Field p = Field::delta(2), u = Field::delta(2);
  double vp = -INFINITY, vu = -INFINITY;
  for (int n = 1; n <= 64; ++n) {
    p = apply_markov(p);
    u = hitting_step(binary_law(), u);
    vp = std::max(vp, max_orthant_violation(p));
    vu = std::max(vu, max_orthant_violation(u));
  }
  const bool mono = vp <= tol::kMonotoneSlack && vu <= tol::kMonotoneSlack;
  ck.row("max orthant violation P_n, n<=64", 64, vp, "<= 1e-12", vp <= tol::kMonotoneSlack);
  ck.row("max orthant violation u_n, n<=64", 64, vu, "<= 1e-12", vu <= tol::kMonotoneSlack);
  const int n = 16;
  const Field p2n = transition_field(2 * n, 2);
  const std::int64_t reps = scaled(o, 100000);
  bool ov_ok = true;
  std::string detail = "orthant violations " + num(vp) + ", " + num(vu);
  int k = 0;
  for (const Site& xv : {s2(0, 0), s2(2, 0), s2(3, 3)}) {
    const std::uint64_t seed = derive_seed(o.seed, 1400 + k++);
    const auto d = map_replicates(reps, [&](std::int64_t r) {
      Rng rng = make_stream(seed, Stream::kOverlap, static_cast<std::uint64_t>(r));
      return static_cast<double>(overlap_stat(binary_law(), n, 2, Site::Zero(), xv, rng));
    });
    const EstimateCI e = estimate(d);
    const double bound = 2.0 * p2n(xv);
    const bool ok = e.mean <= bound + tol::kSeBand * e.std_error;
    ov_ok = ov_ok && ok;
    std::ostringstream name;
    name << "E D_16 - 2P_32 at x_v=(" << xv(0) << " " << xv(1) << ")";
    ck.row(name.str(), n, e.mean - bound, "<= 3 SE = " + num(3 * e.std_error), ok);
    detail += "; E D " + num(e.mean) + " <= " + num(bound);
  }
  res.pass = mono && ov_ok;
  res.detail = detail;
}

using Runner = void (*)(CriterionResult&, const VerifyOptions&);
const Runner kRunners[kCriterionCount] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14};

const char* const kNames[kCriterionCount] = {
    "fundamental identity",
    "hitting recursion",
    "second moments",
    "Kolmogorov survival asymptotics",
    "Yaglom exponential limit",
    "multiplicity constants",
    "max occupancy tightness",
    "size-bias exactness",
    "spine mean identity",
    "conditioned representation",
    "super-solution and comparison",
    "occupied-site scaling",
    "clustering around the spine",
    "monotonicity and overlap",
};

}  // namespace

double super_kappa() { return SuperSolutionParams::kappa0(); }

const char* criterion_name(int id) {
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("criterion id");
  return kNames[id - 1];
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") {
    std::vector<int> v;
    for (int i = 1; i <= kCriterionCount; ++i) v.push_back(i);
    return v;
  }
  if (suite == "fundamental") return {1, 2, 3};
  if (suite == "exact") return {1, 2, 3, 11, 14};
  if (suite == "simulation") return {4, 5, 6, 7, 12};
  if (suite == "spine") return {8, 9, 13};
  if (suite == "conditioned") return {10};
  std::vector<int> ids;
  std::stringstream ss(suite);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int id = 0;
    try {
      id = std::stoi(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || id < 1 || id > kCriterionCount) {
      throw std::invalid_argument("unknown suite '" + suite +
                                  "' (all | fundamental | exact | simulation | spine | "
                                  "conditioned | comma list of 1..14)");
    }
    ids.push_back(id);
  }
  return ids;
}

CriterionResult run_criterion(int id, const VerifyOptions& opts) {
  CriterionResult res;
  res.id = id;
  res.name = criterion_name(id);
  const auto t0 = std::chrono::steady_clock::now();
  kRunners[id - 1](res, opts);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

bool SuiteResult::all_pass() const {
  if (budget_exceeded) return false;
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

SuiteResult run_suite(const std::vector<int>& ids, const VerifyOptions& opts,
                      const std::function<void(const CriterionResult&)>& on_result) {
  SuiteResult out;
  const auto t0 = std::chrono::steady_clock::now();
  for (int id : ids) {
    const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.budget_seconds > 0.0 && used >= opts.budget_seconds) {
      CriterionResult skipped;
      skipped.id = id;
      skipped.name = criterion_name(id);
      skipped.skipped = true;
      skipped.detail = "not run: budget exhausted";
      out.budget_exceeded = true;
      out.results.push_back(skipped);
    } else {
      out.results.push_back(run_criterion(id, opts));
    }
    if (on_result) on_result(out.results.back());
  }
  return out;
}

}  // namespace brw
