#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccg/leader.hpp"
#include "ccg/scenario.hpp"

namespace ccg {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct RunOptions {
  std::filesystem::path out;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 1;
  /// When false, wall-clock and memory columns are written as 0 / empty so
  /// that repeated runs produce identical files.
  bool timing = true;
};

struct RunRecord {
  std::string variant;
  std::uint64_t seed = 0;
  std::string run_id;
  std::optional<ZoTrace> trace;  ///< empty when the run failed
  std::string error;
  std::filesystem::path file;
};

struct SummaryRow {
  std::string variant;
  std::size_t outer_iter = 0;
  double phi_mean = 0.0;
  double phi_ci99_lo = 0.0;
  double phi_ci99_hi = 0.0;
  double gap_mean = 0.0;
  double wall_ms_mean = 0.0;
};

struct ScenarioReport {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
  std::filesystem::path summary_file;
  std::size_t failures = 0;
};

/// `reps` consecutive seeds from the first variant's zo seed when given,
/// else the scenario's seed list, else that zo seed alone.
std::vector<std::uint64_t> resolve_seeds(const ScenarioConfig& config,
                                         std::optional<std::size_t> reps);

/// Runs every (variant, seed) pair, writes `runs/<run_id>.csv`,
/// `summary.csv`, `run_config.json` and, when a run failed, `failures.csv`
/// under `options.out`. Failed runs are recorded and skipped.
ScenarioReport run_scenario(const ScenarioConfig& config, const Instance& instance,
                            const RunOptions& options);

/// Mean and 99% band per (variant, outer iteration) over successful runs.
/// Variants appear in `variant_order`.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs,
                                  const std::vector<std::string>& variant_order);

/// `run_id,seed,outer_iter,phi_hat,fw_gap,wall_ms,peak_memory_bytes,lmo_calls,samples_drawn`.
void write_metrics(std::ostream& out, const RunRecord& run, bool timing = true);
/// `variant,outer_iter,phi_mean,phi_ci99_lo,phi_ci99_hi,gap_mean,wall_ms_mean`.
void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace ccg
