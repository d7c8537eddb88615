#include "brw/forward_sim.hpp"

#include <algorithm>
#include <cmath>

namespace brw {
namespace {

constexpr int kKeyBits = 21;
constexpr std::int64_t kKeyOffset = std::int64_t{1} << 20;
constexpr SiteKey kKeyMask = (SiteKey{1} << kKeyBits) - 1;

// Key deltas for the stencil in fixed order: origin, -e1, +e1, -e2, ...
std::vector<std::int64_t> stencil_key_deltas(int dim) {
  std::vector<std::int64_t> out;
  out.push_back(0);
  for (int k = 0; k < dim; ++k) {
    const std::int64_t unit = std::int64_t{1} << (kKeyBits * (kMaxDim - 1 - k));
    out.push_back(-unit);
    out.push_back(unit);
  }
  return out;
}

const std::vector<std::int64_t>& key_deltas(int dim) {
  static const std::vector<std::int64_t> table[kMaxDim] = {
      stencil_key_deltas(1), stencil_key_deltas(2), stencil_key_deltas(3)};
  return table[dim - 1];
}

void sort_and_merge(std::vector<OccupancyEntry>& v) {
  std::sort(v.begin(), v.end(),
            [](const OccupancyEntry& a, const OccupancyEntry& b) { return a.key < b.key; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (v[r].count == 0) continue;
    if (w > 0 && v[w - 1].key == v[r].key) {
      v[w - 1].count += v[r].count;
    } else {
      v[w++] = v[r];
    }
  }
  v.resize(w);
}

}  // namespace

SiteKey pack_site(const Site& x) {
  SiteKey key = 0;
  for (int k = 0; k < kMaxDim; ++k) {
    const std::int64_t c = x(k) + kKeyOffset;
    if (c < 0 || c > static_cast<std::int64_t>(kKeyMask)) {
      throw std::out_of_range("site coordinate outside packable range");
    }
    key = (key << kKeyBits) | static_cast<SiteKey>(c);
  }
  return key;
}

Site unpack_site(SiteKey key) {
  Site x;
  for (int k = kMaxDim - 1; k >= 0; --k) {
    x(k) = static_cast<int>(static_cast<std::int64_t>(key & kKeyMask) - kKeyOffset);
    key >>= kKeyBits;
  }
  return x;
}

SparseOccupancy SparseOccupancy::single(int dim, const Site& at) {
  SparseOccupancy occ(dim, 0);
  occ.entries_.push_back({pack_site(at), 1});
  return occ;
}

std::int64_t SparseOccupancy::total() const {
  std::int64_t z = 0;
  for (const auto& e : entries_) z += e.count;
  return z;
}

std::int64_t SparseOccupancy::count_at(const Site& x) const {
  const SiteKey key = pack_site(x);
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), key,
      [](const OccupancyEntry& e, SiteKey k) { return e.key < k; });
  return (it != entries_.end() && it->key == key) ? it->count : 0;
}

void SparseOccupancy::add(const Site& x, std::int64_t count) {
  if (count < 0) throw std::invalid_argument("particle count must be >= 0");
  if (count > 0) entries_.push_back({pack_site(x), count});
}

void SparseOccupancy::normalize() { sort_and_merge(entries_); }

SparseOccupancy SparseOccupancy::translated(const Site& offset) const {
  SparseOccupancy out(dim_, generation_);
  out.entries_.reserve(entries_.size());
  for (const auto& e : entries_) out.entries_.push_back({pack_site(unpack_site(e.key) + offset), e.count});
  return out;
}

void SparseOccupancy::merge(const SparseOccupancy& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  sort_and_merge(entries_);
}

void step_into(const SparseOccupancy& occ, const OffspringDist& dist, Rng& rng,
               SparseOccupancy& out) {
  const int dim = occ.dim();
  const auto& deltas = key_deltas(dim);
  const int m = stencil_size(dim);
  auto& dst = out.raw_entries();
  dst.clear();
  for (const auto& e : occ.entries()) {
    std::int64_t rem = dist.sample_sum(e.count, rng);
    for (int i = 0; i < m - 1 && rem > 0; ++i) {
      const std::int64_t c = sample_binomial(rng, rem, 1.0 / (m - i));
      if (c > 0) {
        dst.push_back({static_cast<SiteKey>(static_cast<std::int64_t>(e.key) + deltas[i]), c});
        rem -= c;
      }
    }
    if (rem > 0) {
      dst.push_back({static_cast<SiteKey>(static_cast<std::int64_t>(e.key) + deltas[m - 1]), rem});
    }
  }
  sort_and_merge(dst);
  out.set_generation(occ.generation() + 1);
}

SparseOccupancy step(const SparseOccupancy& occ, const OffspringDist& dist, Rng& rng) {
  SparseOccupancy out(occ.dim(), occ.generation());
  step_into(occ, dist, rng, out);
  return out;
}

GenStats compute_stats(const SparseOccupancy& occ, Rng* typical_rng) {
  GenStats s;
  s.n = occ.generation();
  for (const auto& e : occ.entries()) {
    s.Z += e.count;
    s.V = std::max(s.V, e.count);
    ++s.Omega;
    if (e.count <= kHistogramMax) {
      ++s.M[e.count];
    } else {
      ++s.overflow_sites;
      s.overflow_mass += e.count;
    }
  }
  if (typical_rng && s.Z > 0) {
    std::uniform_int_distribution<std::int64_t> pick(0, s.Z - 1);
    std::int64_t r = pick(*typical_rng);
    for (const auto& e : occ.entries()) {
      if (r < e.count) {
        s.T = e.count;
        s.S = unpack_site(e.key);
        break;
      }
      r -= e.count;
    }
  }
  return s;
}

SparseOccupancy evolve(const OffspringDist& dist, int n, int dim, Rng& rng, const Site& start) {
  SparseOccupancy cur = SparseOccupancy::single(dim, start);
  SparseOccupancy next(dim);
  for (int k = 0; k < n; ++k) {
    if (cur.empty()) {
      cur.set_generation(n);
      break;
    }
    step_into(cur, dist, rng, next);
    std::swap(cur, next);
  }
  cur.set_generation(n);
  return cur;
}

RunResult run(const OffspringDist& dist, int n, int dim, Rng& rng, RunOptions opts) {
  if (n < 0) throw std::invalid_argument("generation must be >= 0");
  RunResult res;
  SparseOccupancy occ = evolve(dist, n, dim, rng);
  res.stats = compute_stats(occ, opts.typical ? &rng : nullptr);
  if (opts.keep_occupancy) res.occupancy = std::move(occ);
  return res;
}

RunResult run_conditioned(const OffspringDist& dist, int n, int dim, Rng& rng, RunOptions opts,
                          std::int64_t max_attempts) {
  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    SparseOccupancy occ = evolve(dist, n, dim, rng);
    if (occ.empty()) continue;
    RunResult res;
    res.attempts = attempt;
    res.stats = compute_stats(occ, opts.typical ? &rng : nullptr);
    if (opts.keep_occupancy) res.occupancy = std::move(occ);
    return res;
  }
  throw BudgetExceeded(max_attempts);
}

std::int64_t run_population(const OffspringDist& dist, int n, Rng& rng) {
  std::int64_t z = 1;
  for (int k = 0; k < n && z > 0; ++k) z = dist.sample_sum(z, rng);
  return z;
}

PopulationSample run_population_conditioned(const OffspringDist& dist, int n, Rng& rng,
                                            std::int64_t max_attempts) {
  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::int64_t z = run_population(dist, n, rng);
    if (z > 0) return {z, attempt};
  }
  throw BudgetExceeded(max_attempts);
}

std::int64_t count_at(const OffspringDist& dist, int gens, int dim, const Site& target,
                      Rng& rng) {
  if (gens < 0) throw std::invalid_argument("generation must be >= 0");
  if (l1_norm(target) > gens) return 0;
  SparseOccupancy cur = SparseOccupancy::single(dim);
  SparseOccupancy next(dim);
  for (int k = 0; k < gens; ++k) {
    step_into(cur, dist, rng, next);
    const int remaining = gens - k - 1;
    auto& entries = next.raw_entries();
    entries.erase(std::remove_if(entries.begin(), entries.end(),
                                 [&](const OccupancyEntry& e) {
                                   return l1_norm(unpack_site(e.key) - target) > remaining;
                                 }),
                  entries.end());
    std::swap(cur, next);
    if (cur.empty()) return 0;
  }
  return cur.count_at(target);
}

std::int64_t overlap_stat(const OffspringDist& dist, int n, int dim, const Site& x_u,
                          const Site& x_v, Rng& rng) {
  const SparseOccupancy a = evolve(dist, n, dim, rng, x_u);
  const SparseOccupancy b = evolve(dist, n, dim, rng, x_v);
  std::int64_t d = 0;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  while (ia != a.entries().end() && ib != b.entries().end()) {
    if (ia->key < ib->key) {
      ++ia;
    } else if (ib->key < ia->key) {
      ++ib;
    } else {
      d += ia->count + ib->count;
      ++ia;
      ++ib;
    }
  }
  return d;
}

std::vector<Site> ball_offsets(int dim, int ell) {
  check_dim(dim);
  if (ell < 0) throw std::invalid_argument("ball radius must be >= 0");
  std::vector<Site> out;
  const std::int64_t r2 = static_cast<std::int64_t>(ell) * ell;
  Field::for_each_in_box(dim, ell, [&](const Site& x) {
    if (squared_norm(x) <= r2) out.push_back(x);
  });
  return out;
}

BallStats ball_stats(const SparseOccupancy& occ, const Site& center, int ell) {
  BallStats b;
  for (const Site& off : ball_offsets(occ.dim(), ell)) {
    const std::int64_t c = occ.count_at(center + off);
    ++b.sites;
    if (c == 0) ++b.unoccupied;
    b.particles += c;
  }
  return b;
}

}  // namespace brw
