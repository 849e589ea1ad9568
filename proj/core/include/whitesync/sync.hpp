#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "whitesync/env.hpp"
#include "whitesync/strategy.hpp"

namespace whitesync {

/// Per-round success probability of a fixed strategy pair on a fixed
/// environment: sum over channels of mu_a(j) * mu_b(j) * a_j * b_j * e_j.
struct SyncProbability {
  double value = 0.0;
};

/// Exact per-round success probability, accumulated over the intersection
/// of the two supports.
SyncProbability sync_probability(const ChannelDistribution& mu_a,
                                 const ChannelDistribution& mu_b,
                                 const Environment& env);

/// Expected sync time of a fixed strategy pair given the environment: the
/// round count is geometric with success probability r, so the mean is
/// 1/r. Returns +infinity when r == 0 (the parties can never sync).
double expected_sync_time_fixed(SyncProbability r);

/// Result of one simulated discovery attempt. `channel` is present iff the
/// parties synced; `rounds` then holds the sync round, otherwise the
/// max_rounds budget that was exhausted.
struct RoundOutcome {
  std::uint64_t rounds = 0;
  std::optional<std::uint32_t> channel;

  bool synced() const { return channel.has_value(); }
};

/// Round budget two orders of magnitude above the expected sync scale,
/// 100 * ceil(1/(p1 p2 q^2)), keeping truncation bias on means below 1%.
std::uint64_t default_max_rounds(const Densities& d);

/// Residue-class count for the clocked schedule: ceil(20 / (min(p1,p2)*q)).
/// Large enough that the chance of finishing a whole period without a sync
/// is below e^-10, so conditional means are unbiased in practice.
std::uint32_t default_partition_width(const Densities& d);

/// Round-by-round Monte Carlo for a fixed (stationary i.i.d.) strategy
/// pair: both parties redraw from their distributions each round; they
/// sync at the first round where the draws coincide on a triple-open
/// channel. Returns an unsynced outcome after max_rounds, or immediately
/// when a party that needs open channels has none.
RoundOutcome simulate_stationary(const StrategySpec& spec_a,
                                 const StrategySpec& spec_b,
                                 const Environment& env, const Densities& d,
                                 std::uint64_t max_rounds,
                                 std::mt19937_64& rng);

/// Clocked schedule: per shared round t each party plays clocked_choice;
/// they sync when the choices match on a channel open in the global
/// environment (a matched id is open for both parties by construction).
/// Choices are deterministic, so the schedule repeats after `width`
/// rounds and the only randomness is in the environment.
RoundOutcome simulate_clocked(const Environment& env, std::uint32_t width,
                              std::uint64_t max_rounds);

}  // namespace whitesync
