#pragma once

#include <cstdint>
#include <random>

namespace brw {

using Rng = std::mt19937_64;

/// Well-known stream ids. Every stochastic command derives replicate
/// generators from (master seed, stream id, replicate index).
enum class Stream : std::uint64_t {
  kForward = 1,
  kConditioned = 2,
  kSpine = 3,
  kUTransform = 4,
  kOverlap = 5,
  kSelfTest = 6,
  kPopulation = 7,
};

/// Counter-based substream: the 64-bit seed, stream id and replicate index
/// are split into 32-bit words and fed through std::seed_seq.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(rep),
                    static_cast<std::uint32_t>(rep >> 32)};
  return Rng(seq);
}

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t rep) {
  return make_stream(seed, static_cast<std::uint64_t>(stream), rep);
}

inline double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

/// Exact Binomial(n, p). Small n uses direct Bernoulli counting.
inline std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n < 16) {
    std::int64_t c = 0;
    for (std::int64_t i = 0; i < n; ++i) c += uniform01(rng) < p ? 1 : 0;
    return c;
  }
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

}  // namespace brw
