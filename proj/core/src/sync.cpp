#include "whitesync/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace whitesync {

SyncProbability sync_probability(const ChannelDistribution& mu_a,
                                 const ChannelDistribution& mu_b,
                                 const Environment& env) {
  const std::size_t n = env.channel_count();
  if ((!mu_a.support.empty() && mu_a.support.back() >= n) ||
      (!mu_b.support.empty() && mu_b.support.back() >= n)) {
    throw std::invalid_argument(
        "sync_probability: strategy support exceeds the environment");
  }
  double r = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < mu_a.support.size() && ib < mu_b.support.size()) {
    const std::uint32_t ja = mu_a.support[ia];
    const std::uint32_t jb = mu_b.support[ib];
    if (ja < jb) {
      ++ia;
    } else if (jb < ja) {
      ++ib;
    } else {
      if (env.a.test(ja) && env.b.test(ja) && env.e.test(ja)) {
        r += mu_a.weights[ia] * mu_b.weights[ib];
      }
      ++ia;
      ++ib;
    }
  }
  return SyncProbability{r};
}

double expected_sync_time_fixed(SyncProbability r) {
  if (r.value <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / r.value;
}

std::uint64_t default_max_rounds(const Densities& d) {
  const double scale = std::ceil(1.0 / (d.p1 * d.p2 * d.q * d.q));
  return 100 * static_cast<std::uint64_t>(scale);
}

std::uint32_t default_partition_width(const Densities& d) {
  const double min_p = std::min(d.p1, d.p2);
  return static_cast<std::uint32_t>(std::ceil(20.0 / (min_p * d.q)));
}

RoundOutcome simulate_stationary(const StrategySpec& spec_a,
                                 const StrategySpec& spec_b,
                                 const Environment& env, const Densities& d,
                                 std::uint64_t max_rounds,
                                 std::mt19937_64& rng) {
  if (max_rounds == 0) {
    throw std::invalid_argument("simulate_stationary: max_rounds must be >= 1");
  }
  const OpenIndex open_a = open_index(env, Party::Alice);
  const OpenIndex open_b = open_index(env, Party::Bob);
  if ((requires_open_channels(spec_a.kind) && open_a.indices.empty()) ||
      (requires_open_channels(spec_b.kind) && open_b.indices.empty())) {
    return RoundOutcome{max_rounds, std::nullopt};
  }

  const ChannelDistribution mu_a =
      build_distribution(spec_a, open_a, env.channel_count(), d, Party::Alice);
  const ChannelDistribution mu_b =
      build_distribution(spec_b, open_b, env.channel_count(), d, Party::Bob);

  for (std::uint64_t t = 1; t <= max_rounds; ++t) {
    const std::uint32_t ca = sample_channel(mu_a, rng);
    const std::uint32_t cb = sample_channel(mu_b, rng);
    if (ca == cb && env.a.test(ca) && env.b.test(ca) && env.e.test(ca)) {
      return RoundOutcome{t, ca};
    }
  }
  return RoundOutcome{max_rounds, std::nullopt};
}

RoundOutcome simulate_clocked(const Environment& env, std::uint32_t width,
                              std::uint64_t max_rounds) {
  if (width == 0) {
    throw std::invalid_argument("simulate_clocked: width must be >= 1");
  }
  if (max_rounds == 0) {
    throw std::invalid_argument("simulate_clocked: max_rounds must be >= 1");
  }

  // First open channel per residue class for each party. The per-round
  // choice is then an O(1) lookup.
  const std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> first_a(width, none), first_b(width, none);
  const std::size_t n = env.channel_count();
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint32_t cls = static_cast<std::uint32_t>(j % width);
    if (first_a[cls] == none && env.a.test(j)) {
      first_a[cls] = static_cast<std::uint32_t>(j);
    }
    if (first_b[cls] == none && env.b.test(j)) {
      first_b[cls] = static_cast<std::uint32_t>(j);
    }
  }

  // The schedule repeats with period `width`; rounds past one full period
  // cannot bring anything new.
  const std::uint64_t horizon = std::min<std::uint64_t>(max_rounds, width);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::uint32_t cls = static_cast<std::uint32_t>((t - 1) % width);
    const std::uint32_t ca = first_a[cls];
    const std::uint32_t cb = first_b[cls];
    if (ca != none && ca == cb && env.e.test(ca)) {
      return RoundOutcome{t, ca};
    }
  }
  return RoundOutcome{max_rounds, std::nullopt};
}

}  // namespace whitesync
