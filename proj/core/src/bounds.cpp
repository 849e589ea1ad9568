#include "whitesync/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "whitesync/rng.hpp"
#include "whitesync/sync.hpp"

namespace whitesync {

namespace {

bool same_densities(const Densities& x, const Densities& y) {
  return x.p1 == y.p1 && x.p2 == y.p2 && x.q == y.q;
}

double event_frequency(const std::vector<unsigned char>& flags) {
  std::uint64_t hits = 0;
  for (unsigned char f : flags) hits += f;
  return static_cast<double>(hits) / static_cast<double>(flags.size());
}

}  // namespace

int dyadic_bin(double weight) {
  // weight in (0, 1]; frexp yields weight = f * 2^e with f in [0.5, 1).
  int e = 0;
  const double f = std::frexp(weight, &e);
  return f == 0.5 ? 2 - e : 1 - e;
}

DyadicDecomposition decompose(const ChannelDistribution& dist,
                              const Environment& env, Party side) {
  if (!dist.support.empty() && dist.support.back() >= env.channel_count()) {
    throw std::invalid_argument("decompose: support exceeds the environment");
  }
  const BitVector& local_other = side == Party::Alice ? env.b : env.a;
  DyadicDecomposition dec{side, {}, {}};
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    const std::uint32_t ch = dist.support[i];
    const int k = dyadic_bin(dist.weights[i]);
    dec.levels[k].push_back(ch);
    if (local_other.test(ch) && env.e.test(ch)) {
      dec.t_levels[k].push_back(ch);
    }
  }
  return dec;
}

double cauchy_schwarz_bound(const DyadicDecomposition& a,
                            const DyadicDecomposition& b) {
  double sum_a = 0.0;
  for (const auto& [k, t] : a.t_levels) {
    sum_a += std::sqrt(static_cast<double>(t.size())) * std::ldexp(1.0, -k);
  }
  double sum_b = 0.0;
  for (const auto& [k, t] : b.t_levels) {
    sum_b += std::sqrt(static_cast<double>(t.size())) * std::ldexp(1.0, -k);
  }
  return 4.0 * sum_a * sum_b;
}

double level_threshold(double p_other, double q) {
  return std::log2(1.0 / (p_other * q)) - 3.0;
}

bool tk_large_deviation(const DyadicDecomposition& dec, double k_min,
                        double beta, double p_other, double q) {
  for (const auto& [k, t] : dec.t_levels) {
    if (static_cast<double>(k) < k_min) continue;
    const double threshold = beta * std::ldexp(1.0, k) * p_other * q;
    if (static_cast<double>(t.size()) > threshold) return true;
  }
  return false;
}

bool tk_shallow_nonempty(const DyadicDecomposition& dec, double k_min) {
  for (const auto& [k, t] : dec.t_levels) {
    if (static_cast<double>(k) < k_min && !t.empty()) return true;
  }
  return false;
}

BoundCheckReport check_r_upper(const Densities& d, const StrategySpec& spec_a,
                               const StrategySpec& spec_b, std::size_t n,
                               std::uint64_t samples,
                               std::uint64_t master_seed, double constant,
                               unsigned threads) {
  if (samples < 100) {
    throw std::invalid_argument("check_r_upper: need at least 100 samples");
  }
  const double threshold = constant * normalization(d);

  std::vector<unsigned char> below(samples, 0);
  detail::parallel_for(samples, threads, [&](std::uint64_t begin,
                                             std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const Environment env =
          sample_environment(d, n, derive_seed(master_seed, {i}));
      const OpenIndex open_a = open_index(env, Party::Alice);
      const OpenIndex open_b = open_index(env, Party::Bob);
      double r = 0.0;
      const bool feasible =
          (!requires_open_channels(spec_a.kind) || !open_a.indices.empty()) &&
          (!requires_open_channels(spec_b.kind) || !open_b.indices.empty());
      if (feasible) {
        const ChannelDistribution mu_a =
            build_distribution(spec_a, open_a, n, d, Party::Alice);
        const ChannelDistribution mu_b =
            build_distribution(spec_b, open_b, n, d, Party::Bob);
        r = sync_probability(mu_a, mu_b, env).value;
      }
      below[i] = r < threshold ? 1 : 0;
    }
  });

  BoundCheckReport report{d, spec_a.kind, spec_b.kind, samples};
  report.fraction_below = event_frequency(below);
  report.constant_used = constant;
  report.k_threshold_a = level_threshold(d.p2, d.q);
  report.k_threshold_b = level_threshold(d.p1, d.q);
  report.beta = kBeta;
  return report;
}

TkEventReport check_tk_events(const Densities& d, const StrategySpec& spec,
                              std::size_t n, std::uint64_t samples,
                              std::uint64_t master_seed, double beta,
                              unsigned threads) {
  if (samples < 1000) {
    throw std::invalid_argument("check_tk_events: need at least 1000 samples");
  }
  if (spec.kind == StrategyKind::ClockedPartition) {
    throw std::invalid_argument(
        "check_tk_events: the level decomposition applies to stationary "
        "strategies only");
  }
  const double k_a = level_threshold(d.p2, d.q);
  const double k_b = level_threshold(d.p1, d.q);

  std::vector<unsigned char> large_a(samples, 0), large_b(samples, 0);
  std::vector<unsigned char> nonempty_a(samples, 0), nonempty_b(samples, 0);
  detail::parallel_for(samples, threads, [&](std::uint64_t begin,
                                             std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const Environment env =
          sample_environment(d, n, derive_seed(master_seed, {i}));
      const OpenIndex open_a = open_index(env, Party::Alice);
      if (!requires_open_channels(spec.kind) || !open_a.indices.empty()) {
        const DyadicDecomposition dec_a = decompose(
            build_distribution(spec, open_a, n, d, Party::Alice), env,
            Party::Alice);
        large_a[i] = tk_large_deviation(dec_a, k_a, beta, d.p2, d.q) ? 1 : 0;
        nonempty_a[i] = tk_shallow_nonempty(dec_a, k_a) ? 1 : 0;
      }
      const OpenIndex open_b = open_index(env, Party::Bob);
      if (!requires_open_channels(spec.kind) || !open_b.indices.empty()) {
        const DyadicDecomposition dec_b = decompose(
            build_distribution(spec, open_b, n, d, Party::Bob), env,
            Party::Bob);
        large_b[i] = tk_large_deviation(dec_b, k_b, beta, d.p1, d.q) ? 1 : 0;
        nonempty_b[i] = tk_shallow_nonempty(dec_b, k_b) ? 1 : 0;
      }
    }
  });

  TkEventReport report{d, spec.kind, samples, beta, k_a, k_b};
  report.freq_large_a = event_frequency(large_a);
  report.freq_large_b = event_frequency(large_b);
  report.freq_nonempty_a = event_frequency(nonempty_a);
  report.freq_nonempty_b = event_frequency(nonempty_b);
  return report;
}

LowerBoundCheck stationary_lower_bound_check(const BoundCheckReport& report,
                                             const SweepResult& sweep) {
  if (sweep.cell.strategy_a.kind == StrategyKind::ClockedPartition ||
      sweep.cell.strategy_b.kind == StrategyKind::ClockedPartition) {
    throw InputMismatchError(
        "stationary_lower_bound_check: clocked strategies are not "
        "stationary and are exempt from this bound");
  }
  if (!same_densities(report.densities, sweep.cell.densities)) {
    throw InputMismatchError(
        "stationary_lower_bound_check: report and sweep describe different "
        "densities");
  }
  LowerBoundCheck check;
  check.normalized_mean = sweep.normalized_mean;
  check.threshold = 1.0 / (8.0 * report.constant_used);
  check.margin = check.normalized_mean / check.threshold;
  check.pass = check.normalized_mean >= check.threshold;
  return check;
}

std::string bound_report_csv_columns() {
  return "p1,p2,q,strategy_a,strategy_b,samples,constant,fraction_below,"
         "k_threshold_a,k_threshold_b,beta";
}

std::string to_csv_row(const BoundCheckReport& report) {
  std::ostringstream out;
  out << format_double(report.densities.p1) << ','
      << format_double(report.densities.p2) << ','
      << format_double(report.densities.q) << ',' << kind_name(report.kind_a)
      << ',' << kind_name(report.kind_b) << ',' << report.samples << ','
      << format_double(report.constant_used) << ','
      << format_double(report.fraction_below) << ','
      << format_double(report.k_threshold_a) << ','
      << format_double(report.k_threshold_b) << ','
      << format_double(report.beta);
  return out.str();
}

std::string tk_report_csv_columns() {
  return "p1,p2,q,strategy,samples,beta,k_threshold_a,k_threshold_b,"
         "freq_large_a,freq_large_b,freq_nonempty_a,freq_nonempty_b";
}

std::string to_csv_row(const TkEventReport& report) {
  std::ostringstream out;
  out << format_double(report.densities.p1) << ','
      << format_double(report.densities.p2) << ','
      << format_double(report.densities.q) << ',' << kind_name(report.kind)
      << ',' << report.samples << ',' << format_double(report.beta) << ','
      << format_double(report.k_threshold_a) << ','
      << format_double(report.k_threshold_b) << ','
      << format_double(report.freq_large_a) << ','
      << format_double(report.freq_large_b) << ','
      << format_double(report.freq_nonempty_a) << ','
      << format_double(report.freq_nonempty_b);
  return out.str();
}

}  // namespace whitesync
