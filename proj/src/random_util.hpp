#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace phishscan::detail {

// Uniform integer in [0, bound) from raw engine output. Avoids the standard
// distributions, whose output differs between library implementations.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - kMax % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto j = k + static_cast<std::size_t>(bounded(rng, n - k));
    std::swap(idx[k], idx[j]);
  }
  return idx;
}

}  // namespace phishscan::detail
