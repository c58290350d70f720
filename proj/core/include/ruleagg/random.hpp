#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ruleagg {

// 64-bit FNV-1a; stable across platforms, used for seeding and content hashes.
constexpr std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// std::mt19937_64 output is fixed by the standard; the distributions are not,
// so bounded draws go through these helpers instead.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  __extension__ using Wide = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<Wide>(rng()) * n) >> 64);
}

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace ruleagg
