#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "whitesync/env.hpp"
#include "whitesync/strategy.hpp"
#include "whitesync/sync.hpp"

namespace whitesync {

/// ExactR computes the expected sync time per environment in closed form
/// (1/r); MonteCarlo plays the rounds out and is the cross-check path.
enum class ComputeMode { ExactR, MonteCarlo };

const char* mode_name(ComputeMode mode);

/// p1 * p2 * q^2 — the factor that makes sync times comparable across
/// density triples.
double normalization(const Densities& d);

/// One sweep cell: a density triple, a stationary strategy pair, and the
/// sampling budget.
struct CellSpec {
  Densities densities;
  StrategySpec strategy_a;
  StrategySpec strategy_b;
  std::size_t n = 10000;
  std::uint64_t replicates = 1000;
  ComputeMode mode = ComputeMode::ExactR;
  std::uint64_t max_rounds = 0;  // 0 = default_max_rounds(densities)
};

/// Aggregated normalized sync time over sampled environments. Statistics
/// cover only environments where a sync is possible; n_failed counts the
/// rest (no triple-open channel reachable by both strategies).
struct SweepResult {
  CellSpec cell;
  double normalized_mean = 0.0;
  double normalized_std = 0.0;     // population std over environments
  double normalized_stderr = 0.0;  // normalized_std / sqrt(successes)
  std::uint64_t n_failed = 0;
  std::uint64_t n_total = 0;
  std::uint64_t master_seed = 0;
};

/// Runs one cell. Per-replicate seeds derive from (master_seed,
/// cell_index, replicate), and aggregation runs in replicate order, so the
/// result is identical for any thread count.
SweepResult run_cell(const CellSpec& cell, std::uint64_t master_seed,
                     std::uint64_t cell_index, unsigned threads = 0);

struct ExperimentConfig {
  std::vector<Densities> densities_grid;
  std::vector<double> alpha_grid;
  double epsilon = 1.0;
  std::size_t n = 10000;
  std::uint64_t replicates = 1000;
  std::uint64_t master_seed = 1;
  ComputeMode mode = ComputeMode::ExactR;
  std::uint64_t max_rounds = 0;      // 0 = default per densities
  std::uint32_t clocked_width = 0;   // 0 = default per densities
  bool allow_small_n = false;        // accept cells with n*p1*p2*q < 50
  unsigned threads = 0;              // 0 = hardware concurrency
};

/// Hard errors (empty grids, out-of-range parameters, tiny-n cells without
/// the override) throw std::invalid_argument; soft issues come back as
/// warning strings.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Geometric strategy on both sides for every (alpha, densities) cell,
/// ordered by alpha.
std::vector<SweepResult> figure1_sweep(const ExperimentConfig& cfg);

struct ObliviousRow {
  SweepResult result;
  /// normalized_mean / ln^(2+epsilon)(1/(p1 p2 q)); bounded across
  /// densities when the heavy-tail guarantee holds.
  double log_normalized = 0.0;
};

/// Heavy-tail strategy on both sides for every density cell.
std::vector<ObliviousRow> oblivious_sweep(const ExperimentConfig& cfg);

struct ClockedRow {
  Densities densities;
  std::uint32_t width = 0;
  double mean_rounds = 0.0;
  double std_rounds = 0.0;
  double stderr_rounds = 0.0;
  double lower_bound = 0.0;  // 1 / (4 min(p1,p2) q)
  double upper_bound = 0.0;  // 2 / (min(p1,p2) q)
  bool violation = false;    // mean outside [lower, upper] beyond 3 std errors
  std::uint64_t n_failed = 0;
  std::uint64_t n_total = 0;
  std::uint64_t master_seed = 0;
};

/// Clocked schedule per density cell, with the mean round count reported
/// next to its theoretical bracket.
std::vector<ClockedRow> compare_clocked(const ExperimentConfig& cfg);

// ---- output ----------------------------------------------------------

/// %.10g; every numeric column goes through this so identical runs emit
/// identical bytes.
std::string format_double(double value);

using HeaderKv = std::vector<std::pair<std::string, std::string>>;

/// '#'-prefixed header carrying the tool version and the fully resolved
/// configuration (master seed included).
void write_header(std::ostream& out, const std::string& subcommand,
                  const HeaderKv& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& rows);
void write_oblivious_csv(std::ostream& out,
                         const std::vector<ObliviousRow>& rows);
void write_clocked_csv(std::ostream& out, const std::vector<ClockedRow>& rows);

/// One block per density triple (blocks separated by blank lines), columns
/// alpha, mean, mean-std, mean+std. Ready for plotting the alpha sweep
/// with an envelope of one standard deviation.
void write_figure1_gnuplot(std::ostream& out,
                           const std::vector<SweepResult>& rows);

}  // namespace whitesync
