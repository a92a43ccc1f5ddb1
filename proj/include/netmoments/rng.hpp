#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace netmoments {

using Rng = std::mt19937_64;

/// splitmix64 step; used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and an index path, e.g.
/// derive_seed(master, {target_idx, scenario_idx, replicate_idx}).
/// Every unit of randomness in the library gets its own derived stream, so
/// results do not depend on scheduling or worker count.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master;
  std::uint64_t out = splitmix64(s);
  for (std::uint64_t p : path) {
    s ^= p + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    out = splitmix64(s);
  }
  return out;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Exact binomial draw with the obvious shortcuts; count == 0 and the
/// degenerate probabilities consume no randomness.
inline std::uint64_t binomial_draw(Rng& rng, std::uint64_t count, double p) {
  if (count == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return count;
  std::binomial_distribution<std::uint64_t> dist(count, p);
  return dist(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

}  // namespace netmoments
