#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vsgrasp {

using Rng = std::mt19937_64;

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Independent stream for (seed, key); order-independent across keys.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return Rng(seq);
}

inline Rng derived_rng(std::uint64_t seed, std::string_view key) {
  return derived_rng(seed, fnv1a(key));
}

/// Selection sampling (Knuth's Algorithm S): visits a uniformly random
/// k-subset of [0, n) in increasing order with O(1) state.
template <typename Visit>
void selection_sample(std::uint64_t n, std::uint64_t k, Rng& rng, Visit&& visit) {
  std::uint64_t needed = k < n ? k : n;
  for (std::uint64_t i = 0; i < n && needed > 0; ++i) {
    if (needed < n - i) {
      std::uniform_int_distribution<std::uint64_t> dist(0, n - i - 1);
      if (dist(rng) >= needed) continue;
    }
    visit(i);
    --needed;
  }
}

}  // namespace vsgrasp
