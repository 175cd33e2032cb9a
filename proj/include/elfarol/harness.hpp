#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elfarol/analysis.hpp"
#include "elfarol/simulation.hpp"

namespace elfarol {

/**
 * A Monte Carlo sweep: every listed model at every capacity, `runs` seeded runs each.
 *
 * Parsed from JSON. Keys (all optional, defaults shown in README):
 *   model, c, runs, N, T, burn_in, U_enter, U_exit, U_overcrowded,
 *   beta0, gamma, eta (two-element [lo, hi] ranges), epsilon, max_depth, prior_window,
 *   beta_ceiling, learning, M, strategies, noise_q,
 *   tail_sizes, acf_max_lag, L_max, irf_horizon, alpha, volatility_basis, seed, out.
 * Unknown keys are rejected.
 */
struct ExperimentConfig {
  std::vector<ModelKind> models = {ModelKind::Brats};
  std::vector<double> capacities = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int runs = 30;
  GameConfig game;
  ModelParams params;
  AnalysisConfig analysis;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  [[nodiscard]] GameConfig game_at(double capacity) const;
  [[nodiscard]] ModelParams params_for(ModelKind kind) const;

  [[nodiscard]] nlohmann::json to_json() const;
  /// Throws ConfigError on malformed values or unknown keys.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// The calibrated defaults used when a key is absent.
ExperimentConfig default_config();

/// Reads and validates a JSON configuration file. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);

struct CapacitySweep {
  double capacity = 0.0;
  std::vector<RunTrace> traces;
  std::vector<RunAnalysis> analyses;
  CapacityReport report;
};

struct ModelSweep {
  ModelKind kind = ModelKind::Brats;
  std::vector<CapacitySweep> capacities;
};

struct ExperimentResult {
  std::vector<ModelSweep> models;
};

/// Per-capacity convergence figures.
struct ConvergenceRow {
  double capacity = 0.0;
  int runs = 0;
  double mean_rate = 0.0;
  double std_rate = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
};

/// Groups traces by capacity; statistics use rounds after cfg.burn_in.
std::vector<ConvergenceRow> summarize(const std::vector<RunTrace>& traces, const GameConfig& cfg);

/**
 * Simulates every (model, c, run) triple on `jobs` worker threads, then analyses each run
 * and aggregates per capacity. Output is independent of `jobs`.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Re-runs analysis and aggregation on existing traces.
void analyze_result(ExperimentResult& result, const ExperimentConfig& cfg, int jobs = 1);

/// Fails with ConfigError when the directory cannot be created or written.
void ensure_writable(const std::filesystem::path& dir);

/**
 * Writes manifest.json at `dir` and, per model, the run CSVs plus summary.json,
 * tail_report.json, acf.csv, granger_report.json, irf.csv and aic_rank.csv under
 * dir/<model>/.
 */
void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result,
                      const std::filesystem::path& dir);

/// Writes the per-model report files only (used after re-analysis).
void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result,
                   const std::filesystem::path& dir);

/// Loads the manifest and every trace it lists. Throws ConfigError / DomainError.
std::pair<ExperimentConfig, ExperimentResult> load_experiment(const std::filesystem::path& dir);

/// The nine plot-data tables (fig1..fig7, table1..table3) in `dir`.
void write_figure_data(const ExperimentConfig& cfg, const ExperimentResult& result,
                       const std::filesystem::path& dir);

/// Run trace CSV: header t,attendance,diversity,mean_beta.
void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
RunTrace read_trace_csv(const std::filesystem::path& path);

/// run_<c>_<idx>.csv with c to two decimals and idx zero-padded to three digits.
std::string trace_file_name(double capacity, int run_index);

}  // namespace elfarol
