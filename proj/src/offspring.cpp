#include "brw/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace brw {
namespace {

constexpr int kZetaTableMax = 1 << 16;
constexpr double kTableTailMass = 1e-15;

// sum_{l > L} l^-p by Euler-Maclaurin (p > 1).
double power_tail(double p, int L) {
  const double x = L;
  const double f = std::pow(x, -p);
  const double f1 = -p * std::pow(x, -p - 1.0);
  const double f3 = -p * (p + 1.0) * (p + 2.0) * std::pow(x, -p - 3.0);
  const double integral = std::pow(x, 1.0 - p) / (p - 1.0);
  return integral + f / 2.0 - f1 / 12.0 + f3 / 720.0 - f;
}

// sum_{l >= 2} l^-p, explicit up to L plus the Euler-Maclaurin tail.
double power_sum_from_two(double p, int L) {
  double s = 0.0;
  for (int l = L; l >= 2; --l) s += std::pow(static_cast<double>(l), -p);
  return s + power_tail(p, L);
}

}  // namespace

OffspringDist OffspringDist::binary() {
  OffspringDist d = table({{0, 0.5}, {2, 0.5}}, "binary");
  d.binary_ = true;
  return d;
}

OffspringDist OffspringDist::table(std::vector<std::pair<int, double>> probs,
                                   std::string tag) {
  OffspringDist d;
  d.tag_ = std::move(tag);
  d.tail_class_ = TailClass::kFiniteSupport;
  int L = 0;
  for (const auto& [l, q] : probs) {
    if (l < 0) throw std::invalid_argument("offspring count must be >= 0");
    if (!(q > 0.0)) throw std::invalid_argument("offspring probabilities must be > 0");
    L = std::max(L, l);
  }
  d.probs_.assign(L + 1, 0.0);
  for (const auto& [l, q] : probs) d.probs_[l] += q;
  d.finish();
  return d;
}

OffspringDist OffspringDist::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("geometric ratio must lie in (0,1)");
  }
  OffspringDist d;
  std::ostringstream tag;
  tag << "geometric:" << ratio;
  d.tag_ = tag.str();
  d.tail_class_ = TailClass::kExponential;
  d.tail_param_ = -std::log(ratio);
  d.ratio_ = ratio;
  const int L = std::max(
      2, static_cast<int>(std::ceil(std::log(kTableTailMass) / std::log(ratio))));
  d.probs_.assign(L + 1, 0.0);
  d.probs_[0] = ratio;
  for (int l = 1; l <= L; ++l) {
    d.probs_[l] = (1.0 - ratio) * (1.0 - ratio) * std::pow(ratio, l - 1);
  }
  d.tail_mass_ = (1.0 - ratio) * std::pow(ratio, L);
  d.z_max_ = 1.0 / ratio;
  d.finish();
  d.sigma2_ = 2.0 * ratio / (1.0 - ratio);
  return d;
}

OffspringDist OffspringDist::zeta(double alpha) {
  if (!(alpha > 1.5)) {
    throw std::invalid_argument("zeta law needs alpha > 1.5 for finite variance");
  }
  OffspringDist d;
  std::ostringstream tag;
  tag << "zeta:" << alpha;
  d.tag_ = tag.str();
  d.tail_class_ = TailClass::kPolynomial;
  d.tail_param_ = alpha;
  const double s = alpha + 1.5;
  const int L = kZetaTableMax;
  const double z0 = power_sum_from_two(s, L);
  const double z1 = power_sum_from_two(s - 1.0, L);
  // Q_0 = Q_1 = c (z1 - z0), Q_l = c l^-s; mean one forces c = 1/(2 z1 - z0).
  const double c = 1.0 / (2.0 * z1 - z0);
  d.zeta_scale_ = c;
  d.zeta_power_ = s;
  d.probs_.assign(L + 1, 0.0);
  d.probs_[0] = c * (z1 - z0);
  d.probs_[1] = c * (z1 - z0);
  for (int l = 2; l <= L; ++l) d.probs_[l] = c * std::pow(static_cast<double>(l), -s);
  d.tail_mass_ = c * power_tail(s, L);
  d.z_max_ = 1.0;
  d.finish();
  const double second = d.probs_[1] + c * power_sum_from_two(s - 2.0, L);
  d.sigma2_ = second - 1.0;
  return d;
}

OffspringDist OffspringDist::parse(const std::string& spec) {
  if (spec == "binary") return binary();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("unknown offspring spec '" + spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "geometric") return geometric(std::stod(arg));
  if (kind == "zeta") return zeta(std::stod(arg));
  if (kind == "table") {
    std::vector<std::pair<int, double>> probs;
    std::istringstream is(arg);
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("offspring table entries are l=q");
      }
      probs.emplace_back(std::stoi(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
    }
    return table(std::move(probs), spec);
  }
  throw std::invalid_argument("unknown offspring spec '" + spec + "'");
}

void OffspringDist::finish() {
  double total = tail_mass_;
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t l = 0; l < probs_.size(); ++l) {
    total += probs_[l];
    mean += static_cast<double>(l) * probs_[l];
    second += static_cast<double>(l) * l * probs_[l];
  }
  if (tail_class_ == TailClass::kExponential) {
    const double L = table_max();
    const double r = ratio_;
    // E[l ; l > L] for the shifted geometric tail: (1-r) r^L (L + 1/(1-r)).
    mean += (1.0 - r) * std::pow(r, L) * (L + 1.0 / (1.0 - r));
  } else if (tail_class_ == TailClass::kPolynomial) {
    mean += zeta_scale_ * power_tail(zeta_power_ - 1.0, table_max());
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("offspring probabilities must sum to one");
  }
  if (std::abs(mean - 1.0) > 1e-12) {
    throw std::invalid_argument("offspring law must have mean one");
  }
  if (tail_class_ == TailClass::kFiniteSupport) sigma2_ = second - 1.0;
  if (tail_class_ == TailClass::kFiniteSupport && !(sigma2_ > 1e-12)) {
    throw std::invalid_argument("offspring law must have positive variance");
  }
  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t l = 0; l < probs_.size(); ++l) {
    acc += probs_[l];
    cdf_[l] = acc;
  }
}

double OffspringDist::prob(std::int64_t l) const {
  if (l < 0) return 0.0;
  if (l <= table_max()) return probs_[l];
  if (tail_class_ == TailClass::kExponential) {
    return (1.0 - ratio_) * (1.0 - ratio_) * std::pow(ratio_, static_cast<double>(l - 1));
  }
  if (tail_class_ == TailClass::kPolynomial) {
    return zeta_scale_ * std::pow(static_cast<double>(l), -zeta_power_);
  }
  return 0.0;
}

std::vector<std::pair<int, double>> OffspringDist::support() const {
  std::vector<std::pair<int, double>> out;
  for (std::size_t l = 0; l < probs_.size(); ++l) {
    if (probs_[l] > 0.0) out.emplace_back(static_cast<int>(l), probs_[l]);
  }
  return out;
}

void OffspringDist::check_domain(double z) const {
  const bool ok = tail_class_ == TailClass::kFiniteSupport
                      ? (z >= 0.0 && std::isfinite(z))
                      : (z >= 0.0 && (tail_class_ == TailClass::kPolynomial ? z <= z_max_
                                                                             : z < z_max_));
  if (!ok) throw std::domain_error("pgf argument outside domain");
}

double OffspringDist::pgf(double z) const {
  check_domain(z);
  if (tail_class_ == TailClass::kExponential) {
    const double r = ratio_;
    return r + (1.0 - r) * (1.0 - r) * z / (1.0 - r * z);
  }
  double acc = 0.0;
  for (std::size_t l = probs_.size(); l-- > 0;) acc = acc * z + probs_[l];
  if (tail_class_ == TailClass::kPolynomial) {
    // Tail contribution bounded by tail_mass_ z^(L+1); exact at z = 1.
    acc += tail_mass_ * (z == 1.0 ? 1.0 : std::pow(z, table_max() + 1));
  }
  return acc;
}

double OffspringDist::pgf_prime(double z) const {
  check_domain(z);
  if (tail_class_ == TailClass::kExponential) {
    const double r = ratio_;
    const double den = 1.0 - r * z;
    return (1.0 - r) * (1.0 - r) / (den * den);
  }
  double acc = 0.0;
  for (std::size_t l = probs_.size(); l-- > 1;) {
    acc = acc * z + static_cast<double>(l) * probs_[l];
  }
  if (tail_class_ == TailClass::kPolynomial) {
    const double tail_mean = zeta_scale_ * power_tail(zeta_power_ - 1.0, table_max());
    acc += tail_mean * (z == 1.0 ? 1.0 : std::pow(z, table_max()));
  }
  return acc;
}

double OffspringDist::pgf_excess(double y) const {
  if (y < -1.0) throw std::domain_error("pgf argument outside domain");
  check_domain(1.0 + y);
  if (tail_class_ == TailClass::kExponential) {
    const double r = ratio_;
    return (1.0 - r) * y / (1.0 - r - r * y);
  }
  if (y == -1.0) return pgf(0.0) - 1.0;
  const double ly = std::log1p(y);
  double acc = 0.0;
  for (std::size_t l = probs_.size(); l-- > 1;) {
    if (probs_[l] != 0.0) acc += probs_[l] * std::expm1(static_cast<double>(l) * ly);
  }
  if (tail_class_ == TailClass::kPolynomial) {
    acc += tail_mass_ * std::expm1(static_cast<double>(table_max() + 1) * ly);
  }
  return acc;
}

std::int64_t OffspringDist::sample_tail(Rng& rng) const {
  if (tail_class_ == TailClass::kExponential) {
    std::geometric_distribution<std::int64_t> g(1.0 - ratio_);
    return table_max() + 1 + g(rng);
  }
  // Rejection from the rounded Pareto law on [L + 1/2, inf); the midpoint
  // rule for a convex density keeps the acceptance ratio <= 1.
  const double s = zeta_power_;
  const double lo = table_max() + 0.5;
  while (true) {
    const double u = 1.0 - uniform01(rng);
    const double y = lo * std::pow(u, -1.0 / (s - 1.0));
    if (!(y < 9.0e18)) continue;
    const auto l = static_cast<std::int64_t>(std::floor(y + 0.5));
    const double a = static_cast<double>(l) - 0.5;
    const double cell =
        std::pow(a, 1.0 - s) * -std::expm1((1.0 - s) * std::log1p(1.0 / a)) / (s - 1.0);
    const double target = std::pow(static_cast<double>(l), -s);
    if (uniform01(rng) * cell <= target) return l;
  }
}

std::int64_t OffspringDist::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) {
    if (tail_mass_ > 0.0) return sample_tail(rng);
    return table_max();
  }
  return static_cast<std::int64_t>(it - cdf_.begin());
}

std::int64_t OffspringDist::sample_sum(std::int64_t k, Rng& rng) const {
  if (k <= 0) return 0;
  if (binary_) return 2 * sample_binomial(rng, k, 0.5);
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < k; ++i) total += sample(rng);
  return total;
}

double max_occupancy_delta(const OffspringDist& dist, int dim) {
  double best = -1.0;
  const double log_stencil = std::log(2.0 * dim + 1.0);
  for (const auto& [l0, q] : dist.support()) {
    if (l0 <= 1) continue;
    const double log_p = std::log(q) - l0 * log_stencil;
    best = std::max(best, (l0 - 1.0) / (-l0 * log_p));
  }
  if (best < 0.0) {
    throw std::invalid_argument("offspring law has no admissible l0 > 1");
  }
  return best;
}

}  // namespace brw
