#pragma once

#include <cstdint>

#include "whitesync/env.hpp"
#include "whitesync/strategy.hpp"

namespace whitesync {

/// Exact reference values from enumerating every possible world on a small
/// channel count (all 2^(3n) indicator combinations, weighted by their
/// Bernoulli probabilities). Serves as the anti-bug reference for the
/// sampled sweep path; the per-world success probability is recomputed
/// here channel by channel, independent of sync_probability.
struct ExactEnumeration {
  double conditional_mean = 0.0;  // E[sync time | sync possible]
  double normalized_conditional_mean = 0.0;
  double p_sync_possible = 0.0;   // P(per-round success probability > 0)
  std::uint64_t environments = 0; // 2^(3n)
};

/// n must lie in [1, 8]; the enumeration grows as 8^n. Stationary
/// strategy specs only.
ExactEnumeration enumerate_small_n(const Densities& d, std::size_t n,
                                   const StrategySpec& spec_a,
                                   const StrategySpec& spec_b);

}  // namespace whitesync
