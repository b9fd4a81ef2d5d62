#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace saynav {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable sub-seed for a (base, key...) tuple. Used wherever a result must
/// not depend on how many draws happened elsewhere.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(base, keys));
}

}  // namespace saynav
