#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hygen {

/// Engine used by every sampling stage.
using Engine = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

/// Seed of the named stream (stage, index) under a master seed. Streams for
/// different stages or indices are decorrelated by splitmix64 finalization.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stage,
                                 std::uint64_t index) {
  std::uint64_t h = detail::splitmix64(master_seed);
  h = detail::splitmix64(h ^ detail::fnv1a(stage));
  return detail::splitmix64(h ^ detail::splitmix64(index));
}

inline Engine make_stream(std::uint64_t master_seed, std::string_view stage,
                          std::uint64_t index = 0) {
  return Engine(derive_seed(master_seed, stage, index));
}

/// Uniform draw in [0, 1).
template <class Urbg>
double uniform01(Urbg& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace hygen
