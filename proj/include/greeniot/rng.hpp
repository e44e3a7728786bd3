#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace greeniot {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a seed from a base seed and a path of indices. The result depends
// only on the inputs, never on thread scheduling or call order.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix_seed(base);
  for (std::uint64_t p : path) s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags for the per-episode random sources.
enum class Stream : std::uint64_t {
  kTopology = 1,
  kWorkload = 2,
  kLocations = 3,
  kWeather = 4,
  kArrivals = 5,
  kFading = 6,
  kHistory = 7,
  kScheduler = 8,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, {static_cast<std::uint64_t>(stream), index}));
}

}  // namespace greeniot
