#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "whitesync/oracle.hpp"
#include "whitesync/rng.hpp"
#include "whitesync/sync.hpp"

using namespace whitesync;

namespace {

// Reference path for the per-round success probability: scan every
// channel and look weights up in the supports directly.
double brute_force_r(const ChannelDistribution& mu_a,
                     const ChannelDistribution& mu_b, const Environment& env) {
  const auto weight_of = [](const ChannelDistribution& dist,
                            std::uint32_t ch) -> double {
    const auto it =
        std::lower_bound(dist.support.begin(), dist.support.end(), ch);
    if (it == dist.support.end() || *it != ch) return 0.0;
    return dist.weights[static_cast<std::size_t>(it - dist.support.begin())];
  };
  double r = 0.0;
  for (std::uint32_t j = 0; j < env.channel_count(); ++j) {
    if (env.a.test(j) && env.b.test(j) && env.e.test(j)) {
      r += weight_of(mu_a, j) * weight_of(mu_b, j);
    }
  }
  return r;
}

Environment env_from_bits(const std::string& a, const std::string& b,
                          const std::string& e) {
  return Environment(BitVector::from_string(a), BitVector::from_string(b),
                     BitVector::from_string(e));
}

StrategySpec geometric_spec(double alpha = 1.0 / 6.0) {
  StrategySpec spec;
  spec.kind = StrategyKind::GeometricAware;
  spec.alpha = alpha;
  return spec;
}

}  // namespace

TEST_CASE("disjoint supports can never sync") {
  const Environment env = env_from_bits("10", "01", "11");
  const auto mu_a = geometric_strategy(open_index(env, Party::Alice), 0.3);
  const auto mu_b = geometric_strategy(open_index(env, Party::Bob), 0.3);
  CHECK(sync_probability(mu_a, mu_b, env).value == 0.0);
}

TEST_CASE("matched point masses on a triple-open channel always sync") {
  const Environment env = env_from_bits("010", "010", "010");
  const auto mu_a = geometric_strategy(open_index(env, Party::Alice), 0.5);
  const auto mu_b = geometric_strategy(open_index(env, Party::Bob), 0.5);
  CHECK(sync_probability(mu_a, mu_b, env).value == 1.0);
}

TEST_CASE("sync probability matches the hand-computed mixed case") {
  // Alice (4/7, 2/7, 1/7) against a uniform Bob over three triple-open
  // channels: r = (4/7 + 2/7 + 1/7) / 3 = 1/3.
  const Environment env = env_from_bits("111", "111", "111");
  const auto mu_a = geometric_strategy(open_index(env, Party::Alice), 0.5);
  const auto mu_b = uniform_strategy(3);
  const double r = sync_probability(mu_a, mu_b, env).value;
  CHECK(r == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r == doctest::Approx(brute_force_r(mu_a, mu_b, env)).epsilon(1e-14));
}

TEST_CASE("support-intersection r equals the brute-force scan") {
  std::mt19937_64 rng(31);
  const std::vector<Densities> grid = {
      Densities(0.5, 0.5, 0.5), Densities(0.8, 0.3, 0.4),
      Densities(0.2, 0.9, 0.7)};
  for (int trial = 0; trial < 150; ++trial) {
    const Densities& d = grid[trial % grid.size()];
    const std::size_t n = 1 + rng() % 64;
    const Environment env = sample_environment(d, n, rng());
    const OpenIndex open_a = open_index(env, Party::Alice);
    const OpenIndex open_b = open_index(env, Party::Bob);
    if (open_a.indices.empty() || open_b.indices.empty()) continue;

    const std::vector<ChannelDistribution> strategies_a = {
        geometric_strategy(open_a, 0.2), heavy_tail_strategy(open_a, 1.0),
        uniform_strategy(n)};
    const std::vector<ChannelDistribution> strategies_b = {
        geometric_strategy(open_b, 0.1), heavy_tail_strategy(open_b, 0.5),
        uniform_strategy(n)};
    for (const auto& mu_a : strategies_a) {
      for (const auto& mu_b : strategies_b) {
        const double fast = sync_probability(mu_a, mu_b, env).value;
        const double slow = brute_force_r(mu_a, mu_b, env);
        REQUIRE(fast == doctest::Approx(slow).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("expected sync time of a fixed pair is the inverse success rate") {
  CHECK(expected_sync_time_fixed(SyncProbability{1.0}) == 1.0);
  CHECK(expected_sync_time_fixed(SyncProbability{1.0 / 3.0}) ==
        doctest::Approx(3.0));
  CHECK(expected_sync_time_fixed(SyncProbability{0.0}) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("simulation syncs immediately on matched point masses") {
  const Environment env = env_from_bits("010", "010", "010");
  std::mt19937_64 rng(3);
  const RoundOutcome out = simulate_stationary(
      geometric_spec(), geometric_spec(), env, Densities(0.5, 0.5, 0.5), 100,
      rng);
  REQUIRE(out.synced());
  CHECK(out.rounds == 1);
  CHECK(out.channel == 1u);
}

TEST_CASE("simulation reports no sync when the world forbids it") {
  const Environment env = env_from_bits("111", "111", "000");
  std::mt19937_64 rng(4);
  const RoundOutcome out = simulate_stationary(
      geometric_spec(), geometric_spec(), env, Densities(0.5, 0.5, 0.5), 50,
      rng);
  CHECK_FALSE(out.synced());
  CHECK(out.rounds == 50);
}

TEST_CASE("a party with nothing open fails immediately") {
  const Environment env = env_from_bits("000", "111", "111");
  std::mt19937_64 rng(5);
  const RoundOutcome out = simulate_stationary(
      geometric_spec(), geometric_spec(), env, Densities(0.5, 0.5, 0.5),
      1000000000ULL, rng);
  CHECK_FALSE(out.synced());
}

TEST_CASE("synced outcomes always land on a triple-open channel") {
  const Densities d(0.6, 0.6, 0.5);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Environment env = sample_environment(d, 48, derive_seed(1, {seed}));
    std::mt19937_64 rng(derive_seed(2, {seed}));
    const RoundOutcome out = simulate_stationary(
        geometric_spec(), geometric_spec(), env, d, 20000, rng);
    if (out.synced()) {
      CHECK(env.a.test(*out.channel));
      CHECK(env.b.test(*out.channel));
      CHECK(env.e.test(*out.channel));
      CHECK(out.rounds >= 1);
    }
  }
}

TEST_CASE("simulated sync times follow the geometric law of the exact r") {
  const Densities d(0.5, 0.5, 0.5);
  const Environment env = sample_environment(d, 64, 2026);
  const OpenIndex open_a = open_index(env, Party::Alice);
  const OpenIndex open_b = open_index(env, Party::Bob);
  REQUIRE_FALSE(open_a.indices.empty());
  REQUIRE_FALSE(open_b.indices.empty());
  const double r =
      sync_probability(
          build_distribution(geometric_spec(), open_a, 64, d, Party::Alice),
          build_distribution(geometric_spec(), open_b, 64, d, Party::Bob), env)
          .value;
  REQUIRE(r > 0.0);

  const int replicates = 10000;
  std::mt19937_64 rng(99);
  double total = 0.0;
  for (int i = 0; i < replicates; ++i) {
    const RoundOutcome out = simulate_stationary(
        geometric_spec(), geometric_spec(), env, d, 4000000, rng);
    REQUIRE(out.synced());
    total += static_cast<double>(out.rounds);
  }
  const double mean = total / replicates;
  const double expected = 1.0 / r;
  const double se = (std::sqrt(1.0 - r) / r) / std::sqrt(replicates);
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("per-round success is at least the matched-channel floor") {
  // With rate multiplier alpha, conditioning on the first triple-open
  // channel having rank floor(k) among each party's open channels keeps
  // r above e^(-4 alpha (k+1)) alpha^2 p1 p2 q^2: truncation only raises
  // weights, and the matched channel alone contributes that much.
  const Densities d(0.5, 0.5, 0.5);
  const double alpha = 1.0 / 6.0;
  int worlds_checked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Environment env = sample_environment(d, 2048, derive_seed(7, {seed}));
    const auto counts = open_counts_before(env);
    if (!counts.has_value()) continue;
    const double k = std::floor(
        std::max(static_cast<double>(counts->alice) * d.p2 * d.q,
                 static_cast<double>(counts->bob) * d.p1 * d.q));
    const double floor_bound = std::exp(-4.0 * alpha * (k + 1.0)) * alpha *
                               alpha * d.p1 * d.p2 * d.q * d.q;
    const double r =
        sync_probability(
            build_distribution(geometric_spec(alpha),
                               open_index(env, Party::Alice), 2048, d,
                               Party::Alice),
            build_distribution(geometric_spec(alpha),
                               open_index(env, Party::Bob), 2048, d,
                               Party::Bob),
            env)
            .value;
    REQUIRE(r >= floor_bound * (1.0 - 1e-9));
    ++worlds_checked;
  }
  CHECK(worlds_checked > 250);
}

TEST_CASE("clocked schedule with everything open syncs at round one") {
  const Environment env = env_from_bits("1111", "1111", "1111");
  const RoundOutcome out = simulate_clocked(env, 1, 100);
  REQUIRE(out.synced());
  CHECK(out.rounds == 1);
  CHECK(out.channel == 0u);
}

TEST_CASE("clocked schedule cannot sync through a closed world") {
  const Environment env = env_from_bits("1111", "1111", "0000");
  const RoundOutcome out = simulate_clocked(env, 4, 64);
  CHECK_FALSE(out.synced());
  CHECK(out.rounds == 64);
}

TEST_CASE("clocked simulation agrees with per-round clocked choices") {
  const Densities d(0.5, 0.5, 0.4);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Environment env = sample_environment(d, 96, derive_seed(3, {seed}));
    const std::uint32_t width = 8;
    const RoundOutcome fast = simulate_clocked(env, width, 1000);
    const OpenIndex open_a = open_index(env, Party::Alice);
    const OpenIndex open_b = open_index(env, Party::Bob);
    std::optional<std::uint64_t> expected_round;
    std::optional<std::uint32_t> expected_channel;
    for (std::uint64_t t = 1; t <= width; ++t) {
      const auto ca = clocked_choice(open_a, t, width);
      const auto cb = clocked_choice(open_b, t, width);
      if (ca.has_value() && cb.has_value() && *ca == *cb && env.e.test(*ca)) {
        expected_round = t;
        expected_channel = *ca;
        break;
      }
    }
    if (expected_round.has_value()) {
      REQUIRE(fast.synced());
      CHECK(fast.rounds == *expected_round);
      CHECK(fast.channel == expected_channel);
    } else {
      CHECK_FALSE(fast.synced());
    }
  }
}

TEST_CASE("fully open local environments make the clocked time geometric in q") {
  // With p1 = p2 = 1 both parties always pick their class minimum, i.e.
  // the same channel, so the sync round is the first class whose minimum
  // is globally open: geometric with success probability q.
  const Densities d(1.0, 1.0, 0.5);
  const std::uint32_t width = 512;
  const int replicates = 10000;
  double total = 0.0;
  int synced = 0;
  for (int i = 0; i < replicates; ++i) {
    const Environment env = sample_environment(
        d, 4096, derive_seed(17, {static_cast<std::uint64_t>(i)}));
    const RoundOutcome out = simulate_clocked(env, width, width);
    if (out.synced()) {
      ++synced;
      total += static_cast<double>(out.rounds);
    }
  }
  REQUIRE(synced > replicates * 99 / 100);
  const double mean = total / synced;
  const double expected = 1.0 / d.q;
  const double se =
      (std::sqrt(1.0 - d.q) / d.q) / std::sqrt(static_cast<double>(synced));
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("sampled environment averages converge to the exhaustive oracle") {
  // Primary anti-bug reference: every 6-channel world enumerated exactly,
  // against the Monte Carlo path (sampled environments, simulated rounds).
  const Densities d(0.5, 0.5, 0.5);
  const ExactEnumeration oracle =
      enumerate_small_n(d, 6, geometric_spec(), geometric_spec());
  CHECK(oracle.environments == (1u << 18));
  CHECK(oracle.p_sync_possible > 0.5);
  CHECK(oracle.p_sync_possible < 0.6);

  const int replicates = 30000;
  double total = 0.0, total_sq = 0.0;
  int synced = 0;
  for (int i = 0; i < replicates; ++i) {
    const std::uint64_t u = static_cast<std::uint64_t>(i);
    const Environment env = sample_environment(d, 6, derive_seed(23, {u, 0}));
    std::mt19937_64 rng = derive_rng(23, {u, 1});
    const RoundOutcome out = simulate_stationary(
        geometric_spec(), geometric_spec(), env, d, 400000, rng);
    if (out.synced()) {
      ++synced;
      const double x = static_cast<double>(out.rounds);
      total += x;
      total_sq += x * x;
    }
  }
  const double mean = total / synced;
  const double var = total_sq / synced - mean * mean;
  const double se = std::sqrt(var / synced);
  CHECK(std::abs(mean - oracle.conditional_mean) <= 3.0 * se);

  // The no-sync rate should match 1 - P(sync possible) as well.
  const double fail_rate =
      static_cast<double>(replicates - synced) / replicates;
  const double p_fail = 1.0 - oracle.p_sync_possible;
  const double fail_se = std::sqrt(p_fail * (1.0 - p_fail) / replicates);
  CHECK(std::abs(fail_rate - p_fail) <= 3.0 * fail_se);
}

TEST_CASE("round budgets and partition widths derive from the densities") {
  const Densities d(0.5, 0.5, 0.25);
  CHECK(default_max_rounds(d) == 100 * 64);
  CHECK(default_partition_width(d) == 160);  // ceil(20 / (0.5 * 0.25))
  CHECK(default_max_rounds(Densities(1, 1, 1)) == 100);
}
