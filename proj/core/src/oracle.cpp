#include "whitesync/oracle.hpp"

#include <array>
#include <bit>
#include <stdexcept>
#include <vector>

#include "whitesync/harness.hpp"

namespace whitesync {

namespace {

constexpr std::size_t kMaxChannels = 8;

// P(indicator pattern) for every mask under Bernoulli(p) bits.
std::vector<double> mask_probabilities(double p, std::size_t n) {
  const std::uint32_t count = 1u << n;
  std::vector<double> probs(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    double prob = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      prob *= (mask >> j) & 1u ? p : 1.0 - p;
    }
    probs[mask] = prob;
  }
  return probs;
}

OpenIndex open_index_of_mask(std::uint32_t mask, std::size_t n, Party side) {
  OpenIndex open{side, {}};
  for (std::size_t j = 0; j < n; ++j) {
    if ((mask >> j) & 1u) open.indices.push_back(static_cast<std::uint32_t>(j));
  }
  return open;
}

// Dense per-channel weights for one party's strategy on one local mask;
// all-zero when the party has nothing open to transmit on.
std::array<double, kMaxChannels> dense_weights(const StrategySpec& spec,
                                               std::uint32_t mask,
                                               std::size_t n,
                                               const Densities& d,
                                               Party side) {
  std::array<double, kMaxChannels> w{};
  const OpenIndex open = open_index_of_mask(mask, n, side);
  if (requires_open_channels(spec.kind) && open.indices.empty()) return w;
  const ChannelDistribution dist = build_distribution(spec, open, n, d, side);
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    w[dist.support[i]] = dist.weights[i];
  }
  return w;
}

}  // namespace

ExactEnumeration enumerate_small_n(const Densities& d, std::size_t n,
                                   const StrategySpec& spec_a,
                                   const StrategySpec& spec_b) {
  if (n < 1 || n > kMaxChannels) {
    throw std::invalid_argument("enumerate_small_n: n must lie in [1, 8]");
  }
  if (spec_a.kind == StrategyKind::ClockedPartition ||
      spec_b.kind == StrategyKind::ClockedPartition) {
    throw std::invalid_argument(
        "enumerate_small_n: clocked strategies have no per-round success "
        "probability to enumerate");
  }

  const std::uint32_t count = 1u << n;
  const std::vector<double> pa = mask_probabilities(d.p1, n);
  const std::vector<double> pb = mask_probabilities(d.p2, n);
  const std::vector<double> pe = mask_probabilities(d.q, n);

  std::vector<std::array<double, kMaxChannels>> wa(count), wb(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    wa[mask] = dense_weights(spec_a, mask, n, d, Party::Alice);
    wb[mask] = dense_weights(spec_b, mask, n, d, Party::Bob);
  }

  double p_possible = 0.0;
  double weighted_inverse = 0.0;
  std::vector<double> r_of_e(count);
  std::array<double, kMaxChannels> product{};
  for (std::uint32_t am = 0; am < count; ++am) {
    for (std::uint32_t bm = 0; bm < count; ++bm) {
      const double p_ab = pa[am] * pb[bm];
      if (p_ab == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) product[j] = wa[am][j] * wb[bm][j];
      // Subset sums over the global mask: each mask extends the one with
      // its lowest bit cleared.
      r_of_e[0] = 0.0;
      for (std::uint32_t em = 1; em < count; ++em) {
        const std::uint32_t low = em & (~em + 1);
        r_of_e[em] = r_of_e[em ^ low] +
                     product[static_cast<std::size_t>(std::countr_zero(low))];
      }
      for (std::uint32_t em = 0; em < count; ++em) {
        const double r = r_of_e[em];
        if (r > 0.0) {
          const double p_env = p_ab * pe[em];
          p_possible += p_env;
          weighted_inverse += p_env / r;
        }
      }
    }
  }

  ExactEnumeration out;
  out.environments = std::uint64_t{1} << (3 * n);
  out.p_sync_possible = p_possible;
  if (p_possible > 0.0) {
    out.conditional_mean = weighted_inverse / p_possible;
    out.normalized_conditional_mean = out.conditional_mean * normalization(d);
  }
  return out;
}

}  // namespace whitesync
