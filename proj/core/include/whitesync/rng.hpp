#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace whitesync {

/// One SplitMix64 step. Used for seed mixing only, never as the simulation
/// engine itself.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent seed from a master seed and a path of stream
/// ids, e.g. {cell_index, replicate_index}. A pure function of its inputs,
/// so replicates are reproducible and can run in any order on any number
/// of threads.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t h = splitmix64(state);
  for (std::uint64_t id : path) {
    state = h ^ (id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h = splitmix64(state);
  }
  return h;
}

inline std::mt19937_64 derive_rng(std::uint64_t master,
                                  std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive_seed(master, path));
}

}  // namespace whitesync
