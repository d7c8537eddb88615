#include "brw/stats.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace brw {

EstimateCI estimate(std::span<const double> samples, bool with_quantiles) {
  EstimateCI e;
  e.reps = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return e;
  const Eigen::Map<const Eigen::ArrayXd> x(samples.data(), static_cast<Eigen::Index>(samples.size()));
  e.mean = x.mean();
  if (e.reps >= 2) {
    e.sd = std::sqrt((x - e.mean).square().sum() / static_cast<double>(e.reps - 1));
    e.std_error = e.sd / std::sqrt(static_cast<double>(e.reps));
  }
  if (with_quantiles) {
    std::vector<double> v(samples.begin(), samples.end());
    e.q10 = quantile(v, 0.1);
    e.q50 = quantile(v, 0.5);
    e.q90 = quantile(std::move(v), 0.9);
  }
  return e;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(samples.begin(), samples.end());
  const double h = (static_cast<double>(samples.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("correlation size");
  const auto n = static_cast<Eigen::Index>(a.size());
  const Eigen::Map<const Eigen::ArrayXd> x(a.data(), n), y(b.data(), n);
  const Eigen::ArrayXd dx = x - x.mean();
  const Eigen::ArrayXd dy = y - y.mean();
  const double den = std::sqrt(dx.square().sum() * dy.square().sum());
  return den > 0.0 ? (dx * dy).sum() / den : 0.0;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_against_exponential(std::span<const double> samples, double mu, double level) {
  if (samples.size() < 100) throw std::invalid_argument("KS test needs at least 100 samples");
  if (!(mu > 0.0)) throw std::invalid_argument("exponential mean must be > 0");
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = v[i] <= 0.0 ? 0.0 : -std::expm1(-v[i] / mu);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  KsResult r;
  r.D = d;
  r.p_value = kolmogorov_survival(std::sqrt(n) * d);
  r.pass = r.p_value > level;
  return r;
}

double gamma_q(double a, double x) { return Eigen::numext::igammac(a, x); }

ChiSquareResult chi_square(std::span<const std::int64_t> observed, std::span<const double> probs,
                           double min_expected) {
  std::int64_t total = 0;
  for (auto c : observed) total += c;
  if (total <= 0) throw std::invalid_argument("chi-square needs observations");
  const double N = static_cast<double>(total);

  std::vector<double> exp_cat;
  std::vector<double> obs_cat;
  double prob_sum = 0.0;
  std::int64_t obs_in_support = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    exp_cat.push_back(N * probs[k]);
    const std::int64_t o = k < observed.size() ? observed[k] : 0;
    obs_cat.push_back(static_cast<double>(o));
    prob_sum += probs[k];
    obs_in_support += o;
  }
  const double residual_p = std::max(0.0, 1.0 - prob_sum);
  const std::int64_t residual_o = total - obs_in_support;
  if (residual_p > 0.0 || residual_o > 0) {
    exp_cat.push_back(N * residual_p);
    obs_cat.push_back(static_cast<double>(residual_o));
  }

  // Pool left to right until each bin expects at least min_expected.
  std::vector<double> eb, ob;
  double e_acc = 0.0, o_acc = 0.0;
  for (std::size_t k = 0; k < exp_cat.size(); ++k) {
    e_acc += exp_cat[k];
    o_acc += obs_cat[k];
    if (e_acc >= min_expected) {
      eb.push_back(e_acc);
      ob.push_back(o_acc);
      e_acc = o_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (eb.empty()) {
      eb.push_back(e_acc);
      ob.push_back(o_acc);
    } else {
      eb.back() += e_acc;
      ob.back() += o_acc;
    }
  }

  ChiSquareResult r;
  r.bins = static_cast<int>(eb.size());
  for (std::size_t b = 0; b < eb.size(); ++b) {
    if (eb[b] > 0.0) {
      r.stat += (ob[b] - eb[b]) * (ob[b] - eb[b]) / eb[b];
    } else if (ob[b] > 0.0) {
      r.stat = INFINITY;
    }
  }
  r.dof = std::max(1, r.bins - 1);
  r.p_value = std::isfinite(r.stat) ? gamma_q(0.5 * r.dof, 0.5 * r.stat) : 0.0;
  return r;
}

void write_report_header(std::ostream& os) {
  os << "tag,n,d,offspring,statistic,value,band,pass\n";
}

void write_report_row(std::ostream& os, const ReportRow& row) {
  os << row.tag << ',' << row.n << ',' << row.d << ",\"" << row.offspring << "\",\""
     << row.statistic << "\"," << std::setprecision(10) << row.value << ",\"" << row.band
     << "\"," << (row.pass ? "pass" : "fail") << '\n';
}

std::vector<ReportRow> read_report_csv(std::istream& is) {
  std::vector<ReportRow> rows;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell.push_back(ch);
      }
    }
    cells.push_back(cell);
    if (cells.size() != 8) throw std::runtime_error("report csv: expected 8 columns");
    ReportRow r;
    r.tag = cells[0];
    r.n = std::stoi(cells[1]);
    r.d = std::stoi(cells[2]);
    r.offspring = cells[3];
    r.statistic = cells[4];
    r.value = std::stod(cells[5]);
    r.band = cells[6];
    r.pass = cells[7] == "pass";
    rows.push_back(std::move(r));
  }
  return rows;
}

TightnessResult tightness_table(const std::map<int, std::vector<double>>& stat_by_n,
                                const std::function<double(int)>& normalizer, double ratio_bound,
                                const std::string& tag, int d, const std::string& offspring,
                                const std::string& statistic) {
  TightnessResult out;
  double lo = INFINITY, hi = 0.0;
  for (const auto& [n, samples] : stat_by_n) {
    std::vector<double> scaled(samples.begin(), samples.end());
    const double f = normalizer(n);
    for (double& v : scaled) v /= f;
    const double q = quantile(std::move(scaled), 0.9);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    out.rows.push_back({tag, n, d, offspring, statistic + "_q90", q, "per-n", true});
  }
  out.ratio = lo > 0.0 ? hi / lo : INFINITY;
  out.pass = out.ratio <= ratio_bound;
  std::ostringstream band;
  band << "max/min <= " << ratio_bound;
  const int n_max = stat_by_n.empty() ? 0 : stat_by_n.rbegin()->first;
  out.rows.push_back({tag, n_max, d, offspring, statistic + "_q90_ratio", out.ratio, band.str(),
                      out.pass});
  return out;
}

KappaRow kappa_estimates(int n, std::span<const GenStats> conditioned, int j_max) {
  j_max = std::min(j_max, kHistogramMax);
  KappaRow row;
  row.n = n;
  row.kappa.resize(j_max + 1);
  std::vector<double> buf(conditioned.size());
  for (int j = 1; j <= j_max; ++j) {
    for (std::size_t r = 0; r < conditioned.size(); ++r) {
      const auto& s = conditioned[r];
      buf[r] = s.Z > 0 ? static_cast<double>(s.M[j]) / static_cast<double>(s.Z) : 0.0;
    }
    row.kappa[j] = estimate(buf);
    row.weighted_sum += j * row.kappa[j].mean;
  }
  for (std::size_t r = 0; r < conditioned.size(); ++r) {
    const auto& s = conditioned[r];
    std::int64_t mass = s.overflow_mass;
    for (int j = j_max + 1; j <= kHistogramMax; ++j) mass += j * s.M[j];
    buf[r] = s.Z > 0 ? static_cast<double>(mass) / static_cast<double>(s.Z) : 0.0;
  }
  row.overflow_fraction = estimate(buf);
  row.weighted_sum += row.overflow_fraction.mean;
  row.m1_ratio = row.kappa.size() > 1 ? row.kappa[1] : EstimateCI{};
  return row;
}

}  // namespace brw
