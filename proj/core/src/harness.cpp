#include "whitesync/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "whitesync/rng.hpp"
#include "whitesync/version.hpp"

namespace whitesync {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kEnvSalt = 0;   // environment sampling stream
constexpr std::uint64_t kPlaySalt = 1;  // per-round channel draws

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_of_mean = 0.0;
  std::uint64_t failed = 0;
  std::uint64_t total = 0;
};

// NaN entries mark failed replicates. Two-pass moments in index order.
Aggregate aggregate_values(const std::vector<double>& values) {
  Aggregate out;
  out.total = values.size();
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) {
      ++out.failed;
    } else {
      sum += v;
    }
  }
  const std::uint64_t successes = out.total - out.failed;
  if (successes == 0) return out;
  out.mean = sum / static_cast<double>(successes);
  double sq = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) {
      const double dev = v - out.mean;
      sq += dev * dev;
    }
  }
  out.stddev = std::sqrt(sq / static_cast<double>(successes));
  out.stderr_of_mean = out.stddev / std::sqrt(static_cast<double>(successes));
  return out;
}

void check_cell_regime(const Densities& d, std::size_t n, bool allow_small_n,
                       std::vector<std::string>* warnings) {
  const double mass = static_cast<double>(n) * d.p1 * d.p2 * d.q;
  if (mass >= 50.0) return;
  std::ostringstream msg;
  msg << "n*p1*p2*q = " << mass << " < 50 for (p1=" << d.p1 << ", p2=" << d.p2
      << ", q=" << d.q << ", n=" << n
      << "); the no-sync event is not negligible at this scale";
  if (!allow_small_n) {
    throw std::invalid_argument(msg.str() +
                                " (set allow_small_n to run anyway)");
  }
  if (warnings != nullptr) warnings->push_back(msg.str());
}

std::string strategy_param_or_empty(const StrategySpec& a,
                                    const StrategySpec& b, StrategyKind kind,
                                    double StrategySpec::*field) {
  if (a.kind == kind) return format_double(a.*field);
  if (b.kind == kind) return format_double(b.*field);
  return "";
}

void write_sweep_row(std::ostream& out, const SweepResult& row) {
  const CellSpec& cell = row.cell;
  out << format_double(cell.densities.p1) << ','
      << format_double(cell.densities.p2) << ','
      << format_double(cell.densities.q) << ','
      << kind_name(cell.strategy_a.kind) << ','
      << kind_name(cell.strategy_b.kind) << ','
      << strategy_param_or_empty(cell.strategy_a, cell.strategy_b,
                                 StrategyKind::GeometricAware,
                                 &StrategySpec::alpha)
      << ','
      << strategy_param_or_empty(cell.strategy_a, cell.strategy_b,
                                 StrategyKind::HeavyTailOblivious,
                                 &StrategySpec::epsilon)
      << ',' << cell.n << ',' << cell.replicates << ','
      << format_double(row.normalized_mean) << ','
      << format_double(row.normalized_std) << ','
      << format_double(row.normalized_stderr) << ',' << row.n_failed << ','
      << row.master_seed;
}

constexpr const char* kSweepColumns =
    "p1,p2,q,strategy_a,strategy_b,alpha,epsilon,n,replicates,"
    "normalized_mean,normalized_std,stderr,n_failed,seed";

}  // namespace

const char* mode_name(ComputeMode mode) {
  return mode == ComputeMode::ExactR ? "exact" : "monte-carlo";
}

double normalization(const Densities& d) { return d.p1 * d.p2 * d.q * d.q; }

SweepResult run_cell(const CellSpec& cell, std::uint64_t master_seed,
                     std::uint64_t cell_index, unsigned threads) {
  if (cell.replicates == 0) {
    throw std::invalid_argument("run_cell: replicates must be >= 1");
  }
  if (cell.strategy_a.kind == StrategyKind::ClockedPartition ||
      cell.strategy_b.kind == StrategyKind::ClockedPartition) {
    throw std::invalid_argument(
        "run_cell: clocked strategies are not stationary; use compare_clocked");
  }
  const Densities& d = cell.densities;
  const double norm = normalization(d);
  const std::uint64_t max_rounds =
      cell.max_rounds != 0 ? cell.max_rounds : default_max_rounds(d);

  std::vector<double> values(cell.replicates, kNaN);
  detail::parallel_for(
      cell.replicates, threads,
      [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
          const Environment env = sample_environment(
              d, cell.n, derive_seed(master_seed, {cell_index, i, kEnvSalt}));
          if (cell.mode == ComputeMode::ExactR) {
            const OpenIndex open_a = open_index(env, Party::Alice);
            const OpenIndex open_b = open_index(env, Party::Bob);
            if ((requires_open_channels(cell.strategy_a.kind) &&
                 open_a.indices.empty()) ||
                (requires_open_channels(cell.strategy_b.kind) &&
                 open_b.indices.empty())) {
              continue;
            }
            const ChannelDistribution mu_a = build_distribution(
                cell.strategy_a, open_a, cell.n, d, Party::Alice);
            const ChannelDistribution mu_b = build_distribution(
                cell.strategy_b, open_b, cell.n, d, Party::Bob);
            const double r = sync_probability(mu_a, mu_b, env).value;
            if (r > 0.0) values[i] = norm / r;
          } else {
            std::mt19937_64 rng =
                derive_rng(master_seed, {cell_index, i, kPlaySalt});
            const RoundOutcome outcome = simulate_stationary(
                cell.strategy_a, cell.strategy_b, env, d, max_rounds, rng);
            if (outcome.synced()) {
              values[i] = norm * static_cast<double>(outcome.rounds);
            }
          }
        }
      });

  const Aggregate agg = aggregate_values(values);
  SweepResult result{cell};
  result.normalized_mean = agg.mean;
  result.normalized_std = agg.stddev;
  result.normalized_stderr = agg.stderr_of_mean;
  result.n_failed = agg.failed;
  result.n_total = agg.total;
  result.master_seed = master_seed;
  return result;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> warnings;
  if (cfg.densities_grid.empty()) {
    throw std::invalid_argument("config: densities grid must be nonempty");
  }
  if (cfg.replicates == 0) {
    throw std::invalid_argument("config: replicates must be >= 1");
  }
  if (cfg.n == 0) {
    throw std::invalid_argument("config: n must be >= 1");
  }
  for (double alpha : cfg.alpha_grid) {
    if (!(alpha > 0.0) || alpha >= 1.0) {
      std::ostringstream msg;
      msg << "config: alpha grid value " << alpha << " outside (0, 1)";
      throw std::invalid_argument(msg.str());
    }
    StrategySpec probe;
    probe.kind = StrategyKind::GeometricAware;
    probe.alpha = alpha;
    for (auto& w : probe.validate()) warnings.push_back(std::move(w));
  }
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("config: epsilon must be > 0");
  }
  for (const Densities& d : cfg.densities_grid) {
    check_cell_regime(d, cfg.n, cfg.allow_small_n, &warnings);
  }
  return warnings;
}

std::vector<SweepResult> figure1_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.alpha_grid.empty()) {
    throw std::invalid_argument("figure1_sweep: alpha grid must be nonempty");
  }
  std::vector<double> alphas = cfg.alpha_grid;
  std::sort(alphas.begin(), alphas.end());

  std::vector<SweepResult> rows;
  rows.reserve(alphas.size() * cfg.densities_grid.size());
  std::uint64_t cell_index = 0;
  for (double alpha : alphas) {
    StrategySpec spec;
    spec.kind = StrategyKind::GeometricAware;
    spec.alpha = alpha;
    for (const Densities& d : cfg.densities_grid) {
      CellSpec cell{d, spec, spec, cfg.n, cfg.replicates, cfg.mode,
                    cfg.max_rounds};
      rows.push_back(run_cell(cell, cfg.master_seed, cell_index, cfg.threads));
      ++cell_index;
    }
  }
  return rows;
}

std::vector<ObliviousRow> oblivious_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  StrategySpec spec;
  spec.kind = StrategyKind::HeavyTailOblivious;
  spec.epsilon = cfg.epsilon;

  std::vector<ObliviousRow> rows;
  rows.reserve(cfg.densities_grid.size());
  std::uint64_t cell_index = 0;
  for (const Densities& d : cfg.densities_grid) {
    CellSpec cell{d, spec, spec, cfg.n, cfg.replicates, cfg.mode,
                  cfg.max_rounds};
    ObliviousRow row{run_cell(cell, cfg.master_seed, cell_index, cfg.threads)};
    const double scale =
        std::pow(std::log(1.0 / (d.p1 * d.p2 * d.q)), 2.0 + cfg.epsilon);
    row.log_normalized = row.result.normalized_mean / scale;
    rows.push_back(std::move(row));
    ++cell_index;
  }
  return rows;
}

std::vector<ClockedRow> compare_clocked(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<ClockedRow> rows;
  rows.reserve(cfg.densities_grid.size());
  std::uint64_t cell_index = 0;
  for (const Densities& d : cfg.densities_grid) {
    const std::uint32_t width = cfg.clocked_width != 0
                                    ? cfg.clocked_width
                                    : default_partition_width(d);
    const std::uint64_t max_rounds =
        cfg.max_rounds != 0 ? cfg.max_rounds : width;

    std::vector<double> values(cfg.replicates, kNaN);
    detail::parallel_for(
        cfg.replicates, cfg.threads,
        [&](std::uint64_t begin, std::uint64_t end) {
          for (std::uint64_t i = begin; i < end; ++i) {
            const Environment env = sample_environment(
                d, cfg.n,
                derive_seed(cfg.master_seed, {cell_index, i, kEnvSalt}));
            const RoundOutcome outcome =
                simulate_clocked(env, width, max_rounds);
            if (outcome.synced()) {
              values[i] = static_cast<double>(outcome.rounds);
            }
          }
        });

    const Aggregate agg = aggregate_values(values);
    const double min_p = std::min(d.p1, d.p2);
    ClockedRow row{d, width};
    row.mean_rounds = agg.mean;
    row.std_rounds = agg.stddev;
    row.stderr_rounds = agg.stderr_of_mean;
    row.lower_bound = 1.0 / (4.0 * min_p * d.q);
    row.upper_bound = 2.0 / (min_p * d.q);
    row.violation = agg.total == agg.failed ||
                    row.mean_rounds < row.lower_bound - 3.0 * agg.stderr_of_mean ||
                    row.mean_rounds > row.upper_bound + 3.0 * agg.stderr_of_mean;
    row.n_failed = agg.failed;
    row.n_total = agg.total;
    row.master_seed = cfg.master_seed;
    rows.push_back(std::move(row));
    ++cell_index;
  }
  return rows;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

void write_header(std::ostream& out, const std::string& subcommand,
                  const HeaderKv& config) {
  out << "# whitesync " << kVersion << '\n';
  out << "# subcommand: " << subcommand << '\n';
  for (const auto& [key, value] : config) {
    out << "# " << key << " = " << value << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& rows) {
  out << "# columns: " << kSweepColumns << '\n';
  for (const SweepResult& row : rows) {
    write_sweep_row(out, row);
    out << '\n';
  }
}

void write_oblivious_csv(std::ostream& out,
                         const std::vector<ObliviousRow>& rows) {
  out << "# columns: " << kSweepColumns << ",log_normalized\n";
  for (const ObliviousRow& row : rows) {
    write_sweep_row(out, row.result);
    out << ',' << format_double(row.log_normalized) << '\n';
  }
}

void write_clocked_csv(std::ostream& out, const std::vector<ClockedRow>& rows) {
  out << "# columns: p1,p2,q,width,mean_rounds,std_rounds,stderr,"
         "lower_bound,upper_bound,violation,n_failed,n_total,seed\n";
  for (const ClockedRow& row : rows) {
    out << format_double(row.densities.p1) << ','
        << format_double(row.densities.p2) << ','
        << format_double(row.densities.q) << ',' << row.width << ','
        << format_double(row.mean_rounds) << ','
        << format_double(row.std_rounds) << ','
        << format_double(row.stderr_rounds) << ','
        << format_double(row.lower_bound) << ','
        << format_double(row.upper_bound) << ','
        << (row.violation ? 1 : 0) << ',' << row.n_failed << ',' << row.n_total
        << ',' << row.master_seed << '\n';
  }
}

void write_figure1_gnuplot(std::ostream& out,
                           const std::vector<SweepResult>& rows) {
  out << "# columns: alpha normalized_mean envelope_low envelope_high\n";
  // One block per density triple, rows already ordered by alpha.
  std::vector<Densities> seen;
  for (const SweepResult& row : rows) {
    const Densities& d = row.cell.densities;
    const bool known = std::any_of(seen.begin(), seen.end(),
                                   [&](const Densities& s) {
                                     return s.p1 == d.p1 && s.p2 == d.p2 &&
                                            s.q == d.q;
                                   });
    if (!known) seen.push_back(d);
  }
  bool first_block = true;
  for (const Densities& d : seen) {
    if (!first_block) out << "\n\n";
    first_block = false;
    out << "# p1=" << format_double(d.p1) << " p2=" << format_double(d.p2)
        << " q=" << format_double(d.q) << '\n';
    for (const SweepResult& row : rows) {
      const Densities& rd = row.cell.densities;
      if (rd.p1 != d.p1 || rd.p2 != d.p2 || rd.q != d.q) continue;
      const double alpha = row.cell.strategy_a.alpha;
      out << format_double(alpha) << ' ' << format_double(row.normalized_mean)
          << ' ' << format_double(row.normalized_mean - row.normalized_std)
          << ' ' << format_double(row.normalized_mean + row.normalized_std)
          << '\n';
    }
  }
}

}  // namespace whitesync
