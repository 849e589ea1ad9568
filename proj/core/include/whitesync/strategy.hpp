#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "whitesync/env.hpp"
#include "whitesync/errors.hpp"

namespace whitesync {

/// A party's per-round channel distribution. `support` is strictly
/// increasing, `weights` are strictly positive and sum to 1, `cumulative`
/// holds the prefix sums used for inverse-CDF sampling (last entry pinned
/// to exactly 1).
struct ChannelDistribution {
  std::vector<std::uint32_t> support;
  std::vector<double> weights;
  std::vector<double> cumulative;

  /// Normalizes raw weights over the given support and validates the
  /// invariants above. Raw weights must be strictly positive.
  static ChannelDistribution from_weights(std::vector<std::uint32_t> support,
                                          const std::vector<double>& raw);

  std::size_t size() const { return support.size(); }
};

enum class StrategyKind {
  GeometricAware,      // geometric hop over open channels, needs densities
  HeavyTailOblivious,  // density-free heavy-tailed hop over open channels
  UniformNaive,        // uniform over all channels, open or not
  ClockedPartition,    // deterministic residue-class schedule, needs a clock
};

const char* kind_name(StrategyKind kind);

/// True for strategies that place mass on open channels only and hence
/// cannot be built for a party with an empty open list.
bool requires_open_channels(StrategyKind kind);

/// Declarative description of one party's strategy.
struct StrategySpec {
  StrategyKind kind = StrategyKind::GeometricAware;
  double alpha = 1.0 / 6.0;  // geometric rate multiplier
  double epsilon = 1.0;      // heavy-tail exponent
  std::uint32_t partition_width = 0;  // clocked only; 0 = derive from densities

  /// Returns soft warnings (e.g. alpha in [1/4, 1) is allowed for
  /// exploration but outside the guaranteed range). Hard errors throw
  /// std::invalid_argument.
  std::vector<std::string> validate() const;

  /// Parses "kind[:key=value[,key=value]]", e.g. "geometric:alpha=0.2",
  /// "heavy-tail:epsilon=1", "uniform", "clocked:width=64".
  static StrategySpec parse(std::string_view text);
  std::string to_string() const;
};

/// Geometric hop distribution over a party's open channels: the j-th open
/// channel (j = 1..m) gets weight proportional to (1-rate)^(j-1) * rate,
/// renormalized over the m open channels. Channels whose raw weight falls
/// below the smallest normal double are dropped; they are unreachable at
/// double precision anyway.
ChannelDistribution geometric_strategy(const OpenIndex& open, double rate);

/// Density-oblivious heavy-tail distribution: the j-th open channel gets
/// weight proportional to 1 / ((j+1) * ln(j+1)^(1 + epsilon/2)).
ChannelDistribution heavy_tail_strategy(const OpenIndex& open, double epsilon);

/// Naive baseline: uniform over all n channels, including locally closed
/// ones.
ChannelDistribution uniform_strategy(std::size_t n);

/// Deterministic clocked schedule: among channels with id == (round-1) mod
/// width, the smallest one open for this party, or nullopt when the party
/// has nothing open in that residue class. Both parties must share the
/// round counter and the width.
std::optional<std::uint32_t> clocked_choice(const OpenIndex& open,
                                            std::uint64_t round,
                                            std::uint32_t width);

/// Inverse-CDF draw: returns support[k] with probability weights[k].
std::uint32_t sample_channel(const ChannelDistribution& dist,
                             std::mt19937_64& rng);

/// Geometric rate used by one side: alpha times the *other* party's local
/// density times q.
double geometric_rate(const StrategySpec& spec, const Densities& d, Party side);

/// Builds the per-round distribution for a stationary strategy spec.
/// ClockedPartition has no fixed distribution and is rejected.
ChannelDistribution build_distribution(const StrategySpec& spec,
                                       const OpenIndex& open, std::size_t n,
                                       const Densities& d, Party side);

}  // namespace whitesync
