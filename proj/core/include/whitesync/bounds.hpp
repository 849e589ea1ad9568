#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "whitesync/env.hpp"
#include "whitesync/harness.hpp"
#include "whitesync/strategy.hpp"

namespace whitesync {

/// Dyadic level sets of a strategy distribution on a given environment.
/// Level k collects the support channels whose weight lies in
/// (2^-k, 2^-(k-1)]; since the weights sum to 1, |S_k| < 2^k for every k.
/// t_levels keeps the subset of each level that is open in the two
/// environments the owning party cannot see (b and e for Alice, a and e
/// for Bob). Only populated levels appear in the maps.
struct DyadicDecomposition {
  Party side;
  std::map<int, std::vector<std::uint32_t>> levels;    // S_k
  std::map<int, std::vector<std::uint32_t>> t_levels;  // T_k
};

/// Bin index k with 2^-k < weight <= 2^-(k-1). Weights that are exact
/// powers of two land in the deeper bin (w = 2^-m gives k = m+1); the
/// index comes straight from the exponent bits, no tolerance involved.
int dyadic_bin(double weight);

DyadicDecomposition decompose(const ChannelDistribution& dist,
                              const Environment& env, Party side);

/// 4 * (sum_k sqrt(|T^a_k|) 2^-k) * (sum_l sqrt(|T^b_l|) 2^-l).
/// Cauchy-Schwarz upper bound on the per-round success probability; holds
/// for every environment and any stationary strategy pair.
double cauchy_schwarz_bound(const DyadicDecomposition& a,
                            const DyadicDecomposition& b);

/// Deviation multiplier for the level-occupancy tail events.
inline constexpr double kBeta = 20.0;
/// 128 * beta: with probability >= 1/2 the per-round success probability
/// stays below kRUpperConstant * p1 * p2 * q^2 for any stationary pair.
inline constexpr double kRUpperConstant = 128.0 * kBeta;
/// 1 / (8 * 128 * beta): every stationary pair needs at least
/// kStationaryLowerConstant / (p1 p2 q^2) rounds in expectation.
inline constexpr double kStationaryLowerConstant =
    1.0 / (8.0 * kRUpperConstant);

/// Real-valued level threshold log2(1/(p_other * q)) - 3. Shallow levels
/// (k below it) rarely see any triple-open channel at all; deep levels
/// obey the occupancy tail bound.
double level_threshold(double p_other, double q);

/// True when some level k >= k_min holds more than
/// beta * 2^k * p_other * q channels open in the complementary
/// environments.
bool tk_large_deviation(const DyadicDecomposition& dec, double k_min,
                        double beta, double p_other, double q);

/// True when some level k < k_min holds any channel open in the
/// complementary environments.
bool tk_shallow_nonempty(const DyadicDecomposition& dec, double k_min);

struct BoundCheckReport {
  Densities densities;
  StrategyKind kind_a;
  StrategyKind kind_b;
  std::uint64_t samples = 0;
  double fraction_below = 0.0;  // P(r < constant * p1 p2 q^2), empirically
  double constant_used = kRUpperConstant;
  double k_threshold_a = 0.0;
  double k_threshold_b = 0.0;
  double beta = kBeta;
};

/// Samples environments, builds both strategies, computes r exactly and
/// reports how often it stays below constant * p1 * p2 * q^2. The bound
/// predicts a fraction of at least 1/2.
BoundCheckReport check_r_upper(const Densities& d, const StrategySpec& spec_a,
                               const StrategySpec& spec_b, std::size_t n,
                               std::uint64_t samples,
                               std::uint64_t master_seed,
                               double constant = kRUpperConstant,
                               unsigned threads = 0);

struct TkEventReport {
  Densities densities;
  StrategyKind kind;
  std::uint64_t samples = 0;
  double beta = kBeta;
  double k_threshold_a = 0.0;
  double k_threshold_b = 0.0;
  double freq_large_a = 0.0;     // deep-level occupancy blowup, Alice
  double freq_large_b = 0.0;     // same for Bob
  double freq_nonempty_a = 0.0;  // shallow level populated, Alice
  double freq_nonempty_b = 0.0;  // same for Bob
};

/// Empirical frequencies of the four bad events behind the stationary
/// lower bound. Each should stay below 1/8 (plus sampling noise).
TkEventReport check_tk_events(const Densities& d, const StrategySpec& spec,
                              std::size_t n, std::uint64_t samples,
                              std::uint64_t master_seed, double beta = kBeta,
                              unsigned threads = 0);

struct LowerBoundCheck {
  bool pass = false;
  double normalized_mean = 0.0;
  double threshold = kStationaryLowerConstant;  // 1 / (8 * constant_used)
  double margin = 0.0;                          // normalized_mean / threshold
};

/// Verifies the measured normalized mean sync time against the stationary
/// lower bound 1/(8C) derived from the report's constant. Refuses clocked
/// sweeps (they are not stationary) and mismatched densities.
LowerBoundCheck stationary_lower_bound_check(const BoundCheckReport& report,
                                             const SweepResult& sweep);

std::string bound_report_csv_columns();
std::string to_csv_row(const BoundCheckReport& report);
std::string tk_report_csv_columns();
std::string to_csv_row(const TkEventReport& report);

}  // namespace whitesync
