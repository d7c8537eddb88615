#include "brw/conditioned_rep.hpp"

#include <cmath>
#include <stdexcept>

#include "brw/exact_fields.hpp"
#include "brw/forward_sim.hpp"
#include "brw/offspring.hpp"
#include "brw/parallel.hpp"

namespace brw {
namespace {

const OffspringDist& binary_law() {
  static const OffspringDist law = OffspringDist::binary();
  return law;
}

void check_target(const UFieldBank& bank, const Site& x) {
  if (bank.n() < 1) throw std::invalid_argument("conditioned law needs n >= 1");
  if (!(bank.u(bank.n())(x) > 0.0)) {
    throw std::domain_error("target unreachable: u_n(x) = 0");
  }
}

}  // namespace

UFieldBank::UFieldBank(int n, int dim) : n_(n), dim_(dim) {
  if (n < 0) throw std::invalid_argument("horizon must be >= 0");
  check_dim(dim);
  u_ = hitting_fields(binary_law(), n, dim);
  pu_.reserve(n);
  for (int k = 0; k < n; ++k) pu_.push_back(apply_markov(u_[k]));
}

std::vector<double> utransform_row(const UFieldBank& bank, int m, const Site& z,
                                   const Site& x) {
  const int n = bank.n();
  if (m < 1 || m > n) throw std::invalid_argument("step index out of range");
  const double den = bank.pu(n - m)(x - z);
  if (!(den > 0.0)) throw std::domain_error("u-transform row from an unreachable state");
  const auto nbrs = neighborhood(bank.dim());
  const double p1 = 1.0 / stencil_size(bank.dim());
  const Field& u = bank.u(n - m);
  std::vector<double> row(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) row[i] = p1 * u(x - z - nbrs[i]) / den;
  return row;
}

std::vector<double> pinned_row(int n, int m, const Site& z, const Site& x, int dim) {
  if (m < 1 || m > n) throw std::invalid_argument("step index out of range");
  const Field pa = transition_field(n - m, dim);
  const Field pb = transition_field(n - m + 1, dim);
  const double den = pb(x - z);
  if (!(den > 0.0)) throw std::domain_error("pinned row from an unreachable state");
  const auto nbrs = neighborhood(dim);
  std::vector<double> row(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    row[i] = pa(x - z - nbrs[i]) / (stencil_size(dim) * den);
  }
  return row;
}

UTransformPath sample_utransform_path(const UFieldBank& bank, const Site& x, Rng& rng) {
  check_target(bank, x);
  const auto nbrs = neighborhood(bank.dim());
  UTransformPath p;
  p.n = bank.n();
  p.target = x;
  p.path.reserve(p.n + 1);
  p.path.push_back(Site::Zero());
  for (int m = 1; m <= p.n; ++m) {
    const Site z = p.path.back();
    const auto row = utransform_row(bank, m, z, x);
    double sum = 0.0;
    for (double q : row) sum += q;
    p.max_row_error = std::max(p.max_row_error, std::abs(sum - 1.0));
    const double r = uniform01(rng) * sum;
    std::size_t pick = 0;
    double acc = row[0];
    while (pick + 1 < row.size() && (r >= acc || row[pick] == 0.0)) acc += row[++pick];
    p.path.push_back(z + nbrs[pick]);
    p.step_prob.push_back(row[pick]);
  }
  return p;
}

double beta_m(const UFieldBank& bank, int m, const Site& w, const Site& x) {
  if (m < 0 || m >= bank.n()) throw std::invalid_argument("coin index out of range");
  return 1.0 / (2.0 - bank.pu(bank.n() - m - 1)(x - w));
}

ConditionedDraw sample_conditioned(const UFieldBank& bank, const Site& x, Rng& rng) {
  const UTransformPath p = sample_utransform_path(bank, x, rng);
  const int n = bank.n();
  ConditionedDraw d;
  d.value = 1;
  for (int m = 0; m < n; ++m) {
    const Site& xm = p.path[m];
    d.path_checksum += l1_norm(xm);
    const bool head = uniform01(rng) < beta_m(bank, m, xm, x);
    const Site xi = sample_step(bank.dim(), rng);
    if (head) d.value += count_at(binary_law(), n - m - 1, bank.dim(), x - xm - xi, rng);
  }
  d.path_checksum += l1_norm(p.path[n]);
  return d;
}

std::int64_t sample_conditioned(int n, const Site& x, Rng& rng, int dim) {
  const UFieldBank bank(n, dim);
  return sample_conditioned(bank, x, rng).value;
}

std::vector<ConditionedDraw> sample_conditioned_batch(const UFieldBank& bank, const Site& x,
                                                      std::int64_t reps, std::uint64_t seed) {
  check_target(bank, x);
  return map_replicates(reps, [&](std::int64_t rep) {
    Rng rng = make_stream(seed, Stream::kConditioned, static_cast<std::uint64_t>(rep));
    return sample_conditioned(bank, x, rng);
  });
}

EndpointAudit endpoint_audit(const UFieldBank& bank, const std::vector<Site>& targets,
                             std::int64_t reps, std::uint64_t seed) {
  for (const Site& x : targets) check_target(bank, x);
  EndpointAudit audit;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Site x = targets[t];
    const auto res = map_replicates(reps, [&](std::int64_t rep) {
      Rng rng = make_stream(seed, Stream::kUTransform,
                            static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(reps) +
                                static_cast<std::uint64_t>(rep));
      const UTransformPath p = sample_utransform_path(bank, x, rng);
      return std::pair<bool, double>{p.path.back() != x, p.max_row_error};
    });
    for (const auto& [miss, err] : res) {
      ++audit.paths;
      if (miss) ++audit.violations;
      audit.max_row_error = std::max(audit.max_row_error, err);
    }
  }
  return audit;
}

}  // namespace brw
