#include "brw/spine_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "brw/offspring.hpp"
#include "brw/parallel.hpp"
#include "brw/stats.hpp"

namespace brw {
namespace {

const OffspringDist& binary_law() {
  static const OffspringDist law = OffspringDist::binary();
  return law;
}

void require_n(int n, int min_n) {
  if (n < min_n) throw std::invalid_argument("spine construction needs larger n");
}

}  // namespace

SizeBiasedSample sample_size_biased(int n, int dim, Rng& rng) {
  require_n(n, 0);
  const OffspringDist& law = binary_law();
  SparseOccupancy others(dim, 0);
  SparseOccupancy next(dim);
  Site spine = Site::Zero();
  for (int j = 0; j < n; ++j) {
    step_into(others, law, rng, next);
    std::swap(others, next);
    // The spine splits in two: one child continues the spine, the other
    // joins the ordinary population.
    const Site sibling = spine + sample_step(dim, rng);
    spine += sample_step(dim, rng);
    others.add(sibling, 1);
    others.normalize();
  }
  others.add(spine, 1);
  others.normalize();
  others.set_generation(n);
  return {std::move(others), spine};
}

std::int64_t SpineRealization::t_star() const {
  std::int64_t t = 1 + b0;
  for (std::size_t j = 2; j < attached.size(); ++j) t += attached[j];
  return t;
}

SpineRealization sample_spine_realization(int n, int dim, Rng& rng, bool with_attached) {
  require_n(n, 1);
  SpineRealization r;
  r.path = sample_srw(n, dim, rng);
  r.xi.reserve(n);
  for (int i = 0; i < n; ++i) r.xi.push_back(sample_step(dim, rng));
  r.b0 = uniform01(rng) < 1.0 / stencil_size(dim) ? 1 : 0;
  r.attached.assign(n + 1, 0);
  if (with_attached) {
    const OffspringDist& law = binary_law();
    for (int j = 2; j <= n; ++j) {
      r.attached[j] = count_at(law, j - 1, dim, r.path[j] + r.xi[j - 1], rng);
    }
  }
  return r;
}

std::int64_t sample_typical_occupancy(int n, int dim, Rng& rng) {
  require_n(n, 1);
  return sample_spine_realization(n, dim, rng, true).t_star();
}

double exact_mean_gamma(int n, int dim, double clamp_c) {
  require_n(n, 1);
  double total = 0.0;
  Field p = Field::delta(dim);
  for (int i = 1; i <= n; ++i) {
    p = apply_markov(p, clamp_radius(i, clamp_c));
    if (i >= 2) total += p.values().square().sum();
  }
  return total;
}

std::vector<SpineSample> sample_gamma_delta(const SpineBatchConfig& cfg) {
  require_n(cfg.n, 2);
  for (int i : cfg.tracked_terms) {
    if (i < 1 || i > cfg.n - 1) throw std::invalid_argument("tracked term index out of range");
  }
  struct Draw {
    std::vector<Site> path;
    std::int64_t t_star = 0;
    int b0 = 0;
    std::vector<std::int64_t> tracked_counts;
  };
  auto draws = map_replicates(cfg.reps, [&](std::int64_t rep) {
    Rng rng = make_stream(cfg.seed, Stream::kSpine, static_cast<std::uint64_t>(rep));
    SpineRealization r = sample_spine_realization(cfg.n, cfg.dim, rng, cfg.with_attached);
    Draw d;
    d.t_star = r.t_star();
    d.b0 = r.b0;
    for (int i : cfg.tracked_terms) d.tracked_counts.push_back(r.attached[i + 1]);
    d.path = std::move(r.path);
    return d;
  });

  std::vector<SpineSample> out(draws.size());
  for (std::size_t r = 0; r < draws.size(); ++r) {
    out[r].rep = static_cast<std::int64_t>(r);
    out[r].t_star = draws[r].t_star;
    out[r].b0 = draws[r].b0;
    out[r].tracked.assign(cfg.tracked_terms.size(), 0.0);
  }

  // One sweep over P_i serves every replicate.
  Field p = Field::delta(cfg.dim);
  for (int i = 1; i <= cfg.n; ++i) {
    p = apply_markov(p, clamp_radius(i, cfg.clamp_c));
    if (i < 2) continue;
    for (std::size_t r = 0; r < draws.size(); ++r) {
      const Site& s = draws[r].path[i];
      if (!p.contains(s)) ++out[r].clamp_misses;
      const double pi = p(s);
      out[r].gamma += pi;
      for (std::size_t t = 0; t < cfg.tracked_terms.size(); ++t) {
        if (cfg.tracked_terms[t] + 1 == i) {
          out[r].tracked[t] = static_cast<double>(draws[r].tracked_counts[t]) - pi;
        }
      }
    }
  }
  for (auto& s : out) {
    s.delta = cfg.with_attached ? static_cast<double>(s.t_star - 1 - s.b0) - s.gamma : 0.0;
  }
  return out;
}

BallSample sample_ball(int n, int ell, int dim, Rng& rng) {
  if (ell < 1) throw std::invalid_argument("ball radius must be >= 1");
  const SizeBiasedSample sb = sample_size_biased(n, dim, rng);
  const BallStats b = ball_stats(sb.occupancy, sb.spine_end, ell);
  return {b.particles, b.unoccupied, b.sites, sb.occupancy.total()};
}

SizeBiasCheck sizebias_check(const std::function<double(const GenStats&)>& f, int n, int dim,
                             std::int64_t reps, std::uint64_t seed) {
  const OffspringDist& law = binary_law();
  const auto lhs = map_replicates(reps, [&](std::int64_t rep) {
    Rng rng = make_stream(seed, Stream::kSpine, static_cast<std::uint64_t>(rep));
    const SizeBiasedSample sb = sample_size_biased(n, dim, rng);
    return f(compute_stats(sb.occupancy));
  });
  const auto rhs = map_replicates(reps, [&](std::int64_t rep) {
    Rng rng = make_stream(seed, Stream::kForward, static_cast<std::uint64_t>(rep));
    const SparseOccupancy occ = evolve(law, n, dim, rng);
    const GenStats s = compute_stats(occ);
    return static_cast<double>(s.Z) * f(s);
  });
  SizeBiasCheck out;
  const EstimateCI l = estimate(lhs);
  const EstimateCI r = estimate(rhs);
  out.lhs = l.mean;
  out.lhs_se = l.std_error;
  out.rhs = r.mean;
  out.rhs_se = r.std_error;
  const double se = std::sqrt(l.std_error * l.std_error + r.std_error * r.std_error);
  out.z = se > 0.0 ? (l.mean - r.mean) / se : (l.mean == r.mean ? 0.0 : INFINITY);
  return out;
}

}  // namespace brw
