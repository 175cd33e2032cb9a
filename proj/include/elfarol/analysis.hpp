#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elfarol/econometrics.hpp"
#include "elfarol/game.hpp"
#include "elfarol/simulation.hpp"
#include "elfarol/tail_stats.hpp"

namespace elfarol {

struct AnalysisConfig {
  std::vector<double> tail_fractions = {0.025, 0.05, 0.10};
  int acf_max_lag = 10;
  int max_var_lag = 10;
  int irf_horizon = 15;
  double alpha = 0.05;
  VolatilityBasis volatility_basis = VolatilityBasis::Capacity;

  void validate() const;
};

/// Diversity-change / volatility-change pipeline for one run.
struct GrangerRun {
  bool adf_x_stationary = false;   ///< ADF rejects a unit root in the diversity change
  bool adf_y_stationary = false;
  bool kpss_x_stationary = false;  ///< KPSS does not reject stationarity
  bool kpss_y_stationary = false;
  int lag = 0;
  std::vector<double> aic;         ///< by lag 1 .. max_var_lag
  double p_value = 1.0;
  double statistic = 0.0;
  bool irf_stable = true;
  std::vector<double> irf;         ///< volatility-change response to a diversity-change shock
};

struct RunAnalysis {
  int run_id = 0;
  double mean_rate = 0.0;          ///< post-burn-in mean A_t / N
  double utilisation_error = 0.0;
  std::vector<double> abs_deltas;  ///< post-burn-in |A_t - A_{t-1}|, pooled for Hill

  std::optional<double> sigma_rate;
  std::optional<Autocorrelation> acf;
  std::optional<GrangerRun> granger;
  /// Stage name -> message for every stage that failed on this run.
  std::map<std::string, std::string> failures;
};

/// Series fed to the Granger pipeline: first differences of post-burn-in diversity and
/// volatility, aligned by round.
BivariateSeries<double> stationary_pair(const RunTrace& trace, const GameConfig& cfg,
                                        VolatilityBasis basis);

/// Runs every statistic on one trace. Stage failures are recorded, never thrown.
RunAnalysis analyze_run(const RunTrace& trace, const GameConfig& cfg, const AnalysisConfig& acfg);

struct HillEstimate {
  double tail_fraction = 0.0;
  std::optional<double> alpha;
  std::string error;
};

/// Aggregate for all runs at one capacity.
struct CapacityReport {
  double capacity = 0.0;
  int runs = 0;
  int failed_runs = 0;

  double mean_rate = 0.0;  ///< across-run mean of per-run post-burn-in rates
  double std_rate = 0.0;   ///< across-run sample std (0 for one run)
  double mean_error = 0.0;
  double std_error = 0.0;

  std::optional<double> sigma_rate;  ///< mean over runs with a defined rate
  std::vector<HillEstimate> hill;    ///< pooled |delta| across runs
  std::vector<double> mean_acf;      ///< mean r_k over runs, k = 0..max_lag
  double acf_band = 0.0;             ///< mean band over runs

  std::vector<double> granger_p;     ///< per successful run
  std::vector<int> granger_lags;
  std::optional<double> hmp;
  std::optional<double> hmp_adjusted;  ///< Bonferroni across the capacities tested
  bool granger_significant = false;
};

CapacityReport aggregate_capacity(double capacity, const std::vector<RunAnalysis>& runs,
                                  const AnalysisConfig& acfg, std::size_t capacities_tested);

/// Percentile with linear interpolation (used for IRF and AIC-rank bands).
double percentile(std::vector<double> values, double prob);

/// Ranks 1..L of an AIC vector, 1 = smallest AIC; ties share the lower rank order by lag.
std::vector<int> aic_ranks(const std::vector<double>& aic);

}  // namespace elfarol
