#include "brw/exact_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace brw {

// ---------------------------------------------------------------------------
// Survival and hitting probabilities

std::vector<double> survival_sequence(const OffspringDist& dist, int n) {
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  std::vector<double> s(n + 1);
  s[0] = 1.0;
  for (int k = 0; k < n; ++k) s[k + 1] = -dist.pgf_excess(-s[k]);
  return s;
}

double survival_prob(const OffspringDist& dist, int n) {
  double s = 1.0;
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  for (int k = 0; k < n; ++k) s = -dist.pgf_excess(-s);
  return s;
}

Field hitting_step(const OffspringDist& dist, const Field& u, std::optional<int> clamp) {
  Field w = apply_markov(u, clamp);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double p = w.values()(i);
    w.values()(i) = p == 0.0 ? 0.0 : -dist.pgf_excess(-p);
  }
  return w;
}

Field hitting_field(const OffspringDist& dist, int n, int dim, std::optional<int> clamp) {
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  Field u = Field::delta(dim);
  for (int k = 0; k < n; ++k) u = hitting_step(dist, u, clamp);
  return u;
}

std::vector<Field> hitting_fields(const OffspringDist& dist, int n, int dim,
                                  std::optional<int> clamp) {
  std::vector<Field> out;
  out.reserve(n + 1);
  out.push_back(Field::delta(dim));
  for (int k = 0; k < n; ++k) out.push_back(hitting_step(dist, out.back(), clamp));
  return out;
}

Field kpp_step(const Field& u, std::optional<int> clamp) {
  Field w = apply_markov(u, clamp);
  w.values() = w.values() - 0.5 * w.values().square();
  return w;
}

Field hitting_field_kpp(int n, int dim, std::optional<int> clamp) {
  Field u = Field::delta(dim);
  for (int k = 0; k < n; ++k) u = kpp_step(u, clamp);
  return u;
}

OccupiedMean mean_occupied(const OffspringDist& dist, int n, int dim,
                           std::optional<int> clamp) {
  const Field u = hitting_field(dist, n, dim, clamp);
  return {u.sum(), u.tail_bound()};
}

// ---------------------------------------------------------------------------
// Moment generating fields

namespace {

double checked_excess(const OffspringDist& dist, double y, int step) {
  double out = 0.0;
  try {
    out = dist.pgf_excess(y);
  } catch (const std::domain_error&) {
    throw MgfBlowup(step);
  }
  if (!std::isfinite(out)) throw MgfBlowup(step);
  return out;
}

double checked_prime(const OffspringDist& dist, double z, int step) {
  double out = 0.0;
  try {
    out = dist.pgf_prime(z);
  } catch (const std::domain_error&) {
    throw MgfBlowup(step);
  }
  if (!std::isfinite(out)) throw MgfBlowup(step);
  return out;
}

Field mgf_step(const OffspringDist& dist, const Field& g, int step,
               std::optional<int> clamp) {
  Field w = apply_markov(g, clamp);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double y = w.values()(i);
    w.values()(i) = y == 0.0 ? 0.0 : checked_excess(dist, y, step);
  }
  return w;
}

}  // namespace

Field mgf_field(const OffspringDist& dist, int n, double theta, int dim,
                std::optional<int> clamp) {
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  Field g = Field::delta(dim);
  g.values() *= std::expm1(theta);
  for (int k = 0; k < n; ++k) g = mgf_step(dist, g, k + 1, clamp);
  return g;
}

Field dominating_field(const OffspringDist& dist, int n, double theta, int dim,
                       std::optional<int> clamp) {
  if (n < 1) throw std::invalid_argument("dominating field starts at n = 1");
  Field h = mgf_field(dist, 1, theta, dim, clamp);
  for (int k = 1; k < n; ++k) {
    const double factor = checked_prime(dist, 1.0 + h(Site::Zero()), k + 1);
    h = apply_markov(h, clamp);
    h.values() *= factor;
  }
  return h;
}

Field dominating_field_closed(const OffspringDist& dist, int n, double theta, int dim,
                              std::optional<int> clamp) {
  if (n < 1) throw std::invalid_argument("dominating field starts at n = 1");
  const double h1 = checked_excess(dist, std::expm1(theta) / stencil_size(dim), 1);
  const double scale = h1 * stencil_size(dim);
  Field p = apply_markov(Field::delta(dim), clamp);
  double product = 1.0;
  for (int j = 1; j < n; ++j) {
    const double hj0 = p(Site::Zero()) * scale * product;
    product *= checked_prime(dist, 1.0 + hj0, j + 1);
    p = apply_markov(p, clamp);
  }
  p.values() *= scale * product;
  return p;
}

// ---------------------------------------------------------------------------
// Second moments

void for_each_second_moment(const OffspringDist& dist, int n, int dim,
                            std::optional<int> clamp,
                            const std::function<void(int, const Field&)>& visit) {
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  Field f = Field::delta(dim);
  Field p = Field::delta(dim);
  const double sigma2 = dist.sigma2();
  for (int k = 1; k <= n; ++k) {
    p = apply_markov(p, clamp);
    f = apply_markov(f, clamp);
    f.values() += sigma2 * p.values().square();
    visit(k, f);
  }
}

Field second_moment_field(const OffspringDist& dist, int n, int dim,
                          std::optional<int> clamp) {
  Field out = Field::delta(dim);
  for_each_second_moment(dist, n, dim, clamp, [&](int, const Field& f) { out = f; });
  return out;
}

// ---------------------------------------------------------------------------
// Exact law oracle

PmfField::PmfField(int dim, int radius, int degree)
    : dim_(dim), radius_(radius), degree_(degree), layout_(dim, radius) {
  probs_ = Eigen::ArrayXXd::Zero(layout_.size(), degree + 1);
  truncated_ = Eigen::ArrayXd::Zero(layout_.size());
}

Eigen::ArrayXd PmfField::pmf(const Site& x) const {
  if (!layout_.contains(x)) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(degree_ + 1);
    out(0) = 1.0;
    return out;
  }
  return probs_.row(layout_.index(x)).transpose();
}

Field PmfField::mean_field() const {
  Field f = layout_;
  const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(degree_ + 1, 0, degree_);
  f.values() = (probs_.rowwise() * k.transpose()).rowwise().sum();
  return f;
}

Field PmfField::second_moment_field() const {
  Field f = layout_;
  const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(degree_ + 1, 0, degree_);
  f.values() = (probs_.rowwise() * k.square().transpose()).rowwise().sum();
  return f;
}

Field PmfField::hit_field() const {
  Field f = layout_;
  f.values() = probs_.col(0);
  f.values() = 1.0 - f.values();
  return f;
}

namespace {

// c = a * b truncated at degree D; `deg_*` are the highest nonzero degrees.
int poly_mul(const double* a, int deg_a, const double* b, int deg_b, double* c, int D) {
  const int deg_c = std::min(D, deg_a + deg_b);
  std::fill(c, c + deg_c + 1, 0.0);
  for (int i = 0; i <= deg_a; ++i) {
    if (a[i] == 0.0) continue;
    const int jmax = std::min(deg_b, D - i);
    for (int j = 0; j <= jmax; ++j) c[i + j] += a[i] * b[j];
  }
  return deg_c;
}

}  // namespace

PmfField pmf_oracle(const OffspringDist& dist, int n, int dim, int degree,
                    double max_truncated) {
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  if (degree < 1) throw std::invalid_argument("pmf degree must be >= 1");
  if (dist.table_max() > 256) {
    throw std::invalid_argument("pmf oracle needs an offspring table of at most 256 entries");
  }
  const int D = degree;
  const auto support = dist.support();
  const double dropped_per_step = 1.0 - [&] {
    double s = 0.0;
    for (const auto& [l, q] : support) s += q;
    return s;
  }();
  const int L = support.back().first;
  std::vector<double> q(L + 1, 0.0);
  for (const auto& [l, p] : support) q[l] = p;

  PmfField cur(dim, 0, D);
  cur.probs()(0, 1) = 1.0;
  std::vector<int> cur_deg(1, 1);

  const auto stencil = neighborhood(dim);
  const double inv = 1.0 / stencil_size(dim);
  std::vector<double> avg(D + 1), acc(D + 1), tmp(D + 1);
  for (int k = 0; k < n; ++k) {
    PmfField next(dim, k + 1, D);
    std::vector<int> next_deg(next.layout().size(), 0);
    for (Eigen::Index i = 0; i < next.layout().size(); ++i) {
      const Site y = next.layout().site(i);
      std::fill(avg.begin(), avg.end(), 0.0);
      int deg_avg = 0;
      for (const Site& e : stencil) {
        const Site z = y - e;
        if (!cur.layout().contains(z)) {
          avg[0] += 1.0;
          continue;
        }
        const Eigen::Index j = cur.layout().index(z);
        for (int t = 0; t <= cur_deg[j]; ++t) avg[t] += cur.probs()(j, t);
        deg_avg = std::max(deg_avg, cur_deg[j]);
      }
      for (int t = 0; t <= deg_avg; ++t) avg[t] *= inv;
      // Horner: Phi(A) = (...(Q_L A + Q_{L-1}) A + ...) + Q_0.
      std::fill(acc.begin(), acc.end(), 0.0);
      acc[0] = q[L];
      int deg_acc = 0;
      for (int l = L - 1; l >= 0; --l) {
        deg_acc = poly_mul(acc.data(), deg_acc, avg.data(), deg_avg, tmp.data(), D);
        std::swap(acc, tmp);
        acc[0] += q[l];
      }
      while (deg_acc > 0 && acc[deg_acc] == 0.0) --deg_acc;
      for (int t = 0; t <= deg_acc; ++t) next.probs()(i, t) = acc[t];
      next_deg[i] = deg_acc;
    }
    cur = std::move(next);
    cur_deg = std::move(next_deg);
  }

  // Markov bound from the exact mean: P(U > D) <= (E U - sum_{k<=D} k p_k)/(D+1).
  const Field p_n = transition_field(n, dim);
  const Field partial_mean = cur.mean_field();
  for (Eigen::Index i = 0; i < cur.layout().size(); ++i) {
    const double residual = p_n(cur.layout().site(i)) - partial_mean.values()(i);
    cur.truncated_mass()(i) = std::max(0.0, residual) / (D + 1) + n * dropped_per_step;
  }
  if (cur.max_truncated_mass() > max_truncated) {
    std::ostringstream msg;
    msg << "pmf oracle truncation bound " << cur.max_truncated_mass()
        << " exceeds " << max_truncated << "; raise the degree";
    throw std::runtime_error(msg.str());
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Super-solution

double SuperSolutionParams::beta_n(int n) const {
  return beta * (1.0 - 1.0 / std::log(static_cast<double>(n)));
}

double SuperSolutionParams::kappa0(double beta) { return 4.0 * std::exp(6.0 * beta); }

double supersolution_value(const SuperSolutionParams& params, int n, const Site& x) {
  if (n < 2) throw std::invalid_argument("super-solution needs n >= 2");
  const double nn = n;
  return params.kappa / (nn * std::log(nn)) *
         std::exp(-params.beta_n(n) * static_cast<double>(squared_norm(x)) / (2.0 * nn));
}

Field supersolution_field(const SuperSolutionParams& params, int n, int radius, int dim) {
  Field v(dim, radius);
  v.set_steps(n);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v.values()(i) = supersolution_value(params, n, v.site(i));
  }
  return v;
}

const char* regime_name(MarginRegime r) {
  switch (r) {
    case MarginRegime::kInner: return "inner";
    case MarginRegime::kMiddle: return "middle";
    case MarginRegime::kOuter: return "outer";
    case MarginRegime::kFar: return "far";
  }
  return "?";
}

MarginRegime margin_regime(int n, const Site& x, double delta) {
  const double r = std::sqrt(static_cast<double>(squared_norm(x)));
  if (r <= std::sqrt(10.0 * n)) return MarginRegime::kInner;
  if (r <= delta * n) return MarginRegime::kMiddle;
  if (r <= 3.0 * n) return MarginRegime::kOuter;
  return MarginRegime::kFar;
}

double supersolution_margin(const SuperSolutionParams& params, int n, const Site& x) {
  if (n < 2) throw std::invalid_argument("super-solution needs n >= 2");
  const double nn = n;
  const double b0 = params.beta_n(n);
  const double b1 = params.beta_n(n + 1);
  const double r2 = static_cast<double>(squared_norm(x));
  const double log_v0 = std::log(params.kappa) - std::log(nn * std::log(nn)) - b0 * r2 / (2.0 * nn);
  const double log_v1 = std::log(params.kappa) - std::log((nn + 1.0) * std::log(nn + 1.0)) -
                        b1 * r2 / (2.0 * (nn + 1.0));
  // (P v_n)(x) / v_n(x) = (1/5) sum_e exp(-b0 (2 x.e + |e|^2) / (2n)).
  double ratio = 1.0;
  for (int k = 0; k < 2; ++k) {
    ratio += std::exp(-b0 * (2.0 * x(k) + 1.0) / (2.0 * nn));
    ratio += std::exp(-b0 * (-2.0 * x(k) + 1.0) / (2.0 * nn));
  }
  ratio /= 5.0;
  const double log_pv = log_v0 + std::log(ratio);
  if (log_pv >= std::log(2.0)) return std::numeric_limits<double>::infinity();
  const double pv = std::exp(log_pv);
  return log_v1 - log_pv - std::log1p(-0.5 * pv);
}

SupersolutionReport verify_supersolution(const SuperSolutionParams& params, int n_lo,
                                         int n_hi, double x_factor) {
  SupersolutionReport rep;
  rep.params = params;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  rep.x_factor = x_factor;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (double& m : rep.regime_min) m = std::numeric_limits<double>::infinity();
  if (params.kappa <= 0.0) {
    rep.holds = false;
    rep.min_margin = -std::numeric_limits<double>::infinity();
    rep.argmin_n = n_lo;
    return rep;
  }
  for (int n = std::max(n_lo, 2); n <= n_hi; ++n) {
    const double rmax = x_factor * n;
    const auto rmax2 = static_cast<std::int64_t>(std::floor(rmax * rmax));
    const int imax = static_cast<int>(std::floor(rmax));
    // The margin is invariant under coordinate swaps and sign flips.
    for (int a = 0; a <= imax; ++a) {
      for (int b = 0; b <= a; ++b) {
        const Site x(a, b, 0);
        if (squared_norm(x) > rmax2) break;
        const double m = supersolution_margin(params, n, x);
        const auto regime = margin_regime(n, x);
        if (regime != MarginRegime::kFar) {
          double& slot = rep.regime_min[static_cast<int>(regime)];
          slot = std::min(slot, m);
        }
        if (m < rep.min_margin) {
          rep.min_margin = m;
          rep.argmin_n = n;
          rep.argmin_x = x;
        }
      }
    }
  }
  rep.holds = rep.min_margin >= 0.0;
  return rep;
}

std::optional<int> find_supersolution_n0(const SuperSolutionParams& params, int n0_max,
                                         double x_factor) {
  const int n_top = 4 * n0_max;
  std::vector<char> ok(n_top + 1, 0);
  for (int n = 2; n <= n_top; ++n) {
    ok[n] = verify_supersolution(params, n, n, x_factor).holds ? 1 : 0;
  }
  for (int n0 = 2; n0 <= n0_max; ++n0) {
    bool all = true;
    for (int n = n0; n <= 4 * n0 && all; ++n) all = ok[n] != 0;
    if (all) return n0;
  }
  return std::nullopt;
}

int find_comparison_shift(int n0, double kappa0) {
  auto big_enough = [&](long long m) {
    return static_cast<double>(m) * std::log(static_cast<double>(m)) >= kappa0;
  };
  long long hi = std::max(n0, 2);
  while (!big_enough(hi)) hi *= 2;
  long long lo = std::max(n0, 2);
  while (lo < hi) {
    const long long mid = lo + (hi - lo) / 2;
    if (big_enough(mid)) hi = mid;
    else lo = mid + 1;
  }
  return static_cast<int>(lo);
}

// ---------------------------------------------------------------------------
// Comparison principle

void ComparisonChecker::push(const Field& u, const Field& v) {
  const int k = report_.steps;
  auto fail_hypothesis = [&](const std::string& what) {
    if (report_.hypotheses_ok) {
      std::ostringstream msg;
      msg << what << " at step " << k;
      report_.detail = msg.str();
    }
    report_.hypotheses_ok = false;
    report_.holds = false;
  };

  if ((u.values() < -slack_).any() || (u.values() > 1.0 + slack_).any() ||
      (v.values() < -slack_).any() || (v.values() > 1.0 + slack_).any()) {
    fail_hypothesis("values outside [0,1]");
  }
  if (prev_u_) {
    const Field expected = kpp_step(*prev_u_, u.radius());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (std::abs(expected(u.site(i)) - u.values()(i)) > slack_) {
        fail_hypothesis("u does not follow the hitting recursion");
        break;
      }
    }
  }
  if (prev_v_) {
    const Field pv = apply_markov(*prev_v_);
    const int inner = prev_v_->radius() - 1;
    Field::for_each_in_box(v.dim(), std::max(0, std::min(inner, v.radius())), [&](const Site& x) {
      const double w = pv(x);
      if (v(x) < w * (1.0 - 0.5 * w) - slack_) fail_hypothesis("v is not a super-solution");
    });
  }
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Site x = u.site(i);
    const double excess = u.values()(i) - v(x);
    report_.max_excess = std::max(report_.max_excess, excess);
    if (excess > slack_ && report_.first_violation_n < 0) {
      report_.first_violation_n = k;
      report_.first_violation_x = x;
      report_.holds = false;
      if (k == 0) fail_hypothesis("v_0 does not dominate u_0");
    }
  }
  prev_u_ = u;
  prev_v_ = v;
  ++report_.steps;
}

bool verify_comparison(const std::vector<Field>& u_seq, const std::vector<Field>& v_seq,
                       ComparisonReport* report) {
  if (u_seq.size() != v_seq.size()) throw std::invalid_argument("sequence length mismatch");
  ComparisonChecker checker;
  for (std::size_t k = 0; k < u_seq.size(); ++k) {
    if (u_seq[k].dim() != v_seq[k].dim()) throw std::invalid_argument("dimension mismatch");
    checker.push(u_seq[k], v_seq[k]);
  }
  if (report) *report = checker.report();
  return checker.report().holds;
}

ComparisonReport verify_supersolution_dominates(const SuperSolutionParams& params, int shift,
                                                int n_max, std::optional<int> clamp) {
  ComparisonChecker checker;
  Field u = Field::delta(2);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) u = kpp_step(u, clamp);
    checker.push(u, supersolution_field(params, shift + n, u.radius() + 1));
  }
  return checker.report();
}

// ---------------------------------------------------------------------------

double max_orthant_violation(const Field& f) {
  const int dim = f.dim();
  const int r = f.radius();
  const int w = r + 1;
  std::int64_t size = 1;
  for (int k = 0; k < dim; ++k) size *= w;
  // Running minimum of f over strict orthant predecessors of each site.
  std::vector<double> pred_min(size, std::numeric_limits<double>::infinity());
  std::vector<double> vals(size);
  double worst = -std::numeric_limits<double>::infinity();
  Site y = Site::Zero();
  for (std::int64_t idx = 0; idx < size; ++idx) {
    std::int64_t rem = idx;
    for (int k = dim - 1; k >= 0; --k) {
      y(k) = static_cast<int>(rem % w);
      rem /= w;
    }
    vals[idx] = f(y);
    std::int64_t stride = 1;
    double m = std::numeric_limits<double>::infinity();
    for (int k = dim - 1; k >= 0; --k) {
      if (y(k) > 0) m = std::min({m, vals[idx - stride], pred_min[idx - stride]});
      stride *= w;
    }
    pred_min[idx] = m;
    if (std::isfinite(m)) worst = std::max(worst, vals[idx] - m);
  }
  return worst;
}

}  // namespace brw
