#pragma once

#include <cstdint>
#include <random>

namespace pspin {

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream derived from (master, stream id).
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_stream(std::uint64_t master, std::uint64_t stream) {
  return Engine(split_seed(master, stream));
}

}  // namespace pspin
