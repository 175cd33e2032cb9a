#include "elfarol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "elfarol/diversity.hpp"

namespace elfarol {

void AnalysisConfig::validate() const {
  if (tail_fractions.empty()) throw ConfigError("at least one tail fraction is required");
  for (double f : tail_fractions)
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("tail fractions must lie in (0, 1)");
  if (acf_max_lag < 1) throw ConfigError("acf_max_lag must be positive");
  if (max_var_lag < 1) throw ConfigError("L_max must be positive");
  if (irf_horizon < 1) throw ConfigError("irf_horizon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

namespace {

template <typename T>
std::vector<T> post_burn_in(const std::vector<T>& series, int burn_in) {
  const auto start = std::min<std::size_t>(static_cast<std::size_t>(burn_in), series.size());
  return {series.begin() + static_cast<std::ptrdiff_t>(start), series.end()};
}

std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

GrangerRun granger_pipeline(const BivariateSeries<double>& pair, const AnalysisConfig& acfg) {
  GrangerRun out;
  const std::span<const double> x(pair.x.data(), static_cast<std::size_t>(pair.x.size()));
  const std::span<const double> y(pair.y.data(), static_cast<std::size_t>(pair.y.size()));
  const int adf_lag = schwert_max_lag(x.size());
  out.adf_x_stationary = adf_test(x, adf_lag).reject_at_95;
  out.adf_y_stationary = adf_test(y, adf_lag).reject_at_95;
  out.kpss_x_stationary = !kpss_test(x).reject_at_95;
  out.kpss_y_stationary = !kpss_test(y).reject_at_95;

  const LagSelection<double> sel = select_lag(pair, acfg.max_var_lag);
  out.lag = sel.lag;
  out.aic = sel.aic;
  const TestResult g = granger_test(pair, sel.lag);
  out.p_value = g.p_value;
  out.statistic = g.statistic;

  const VarModel<double> model = fit_var(pair, sel.lag);
  const ImpulseResponse<double> irf = impulse_response(model, acfg.irf_horizon);
  out.irf_stable = irf.stable;
  out.irf = irf.path(1, 0);
  return out;
}

}  // namespace

BivariateSeries<double> stationary_pair(const RunTrace& trace, const GameConfig& cfg,
                                        VolatilityBasis basis) {
  const std::vector<int> attendance = post_burn_in(trace.attendance, cfg.burn_in);
  const ChangeSeries changes = attendance_changes(attendance, cfg.n_agents, basis);
  std::vector<double> diversity = post_burn_in(trace.diversity, cfg.burn_in);
  if (basis == VolatilityBasis::PreviousAttendance) {
    // Skipped rounds (A_{t-1} = 0) break the alignment; keep only matching rounds.
    std::vector<double> aligned;
    for (std::size_t t = 1; t < attendance.size(); ++t)
      if (attendance[t - 1] > 0) aligned.push_back(diversity[t]);
    diversity = std::move(aligned);
  } else {
    diversity.erase(diversity.begin());
  }
  const std::vector<double> dx = difference(diversity);
  const std::vector<double> dy = difference(changes.volatility);
  return make_bivariate<double>(dx, dy);
}

RunAnalysis analyze_run(const RunTrace& trace, const GameConfig& cfg, const AnalysisConfig& acfg) {
  RunAnalysis out;
  out.run_id = trace.run_id;
  const std::vector<int> attendance = post_burn_in(trace.attendance, cfg.burn_in);
  if (attendance.empty()) {
    out.failures["convergence"] = "no rounds after burn-in";
    return out;
  }
  double sum = 0.0;
  for (int a : attendance) sum += a;
  out.mean_rate = sum / static_cast<double>(attendance.size()) / cfg.n_agents;
  out.utilisation_error = utilisation_error(trace.attendance, cfg);

  std::optional<ChangeSeries> changes;
  try {
    changes = attendance_changes(attendance, cfg.n_agents, acfg.volatility_basis);
    for (double d : changes->deltas) out.abs_deltas.push_back(std::abs(d));
  } catch (const std::exception& e) {
    out.failures["changes"] = e.what();
    return out;
  }
  try {
    out.sigma_rate = sigma_event_rate(changes->deltas);
  } catch (const std::exception& e) {
    out.failures["sigma"] = e.what();
  }
  try {
    out.acf = autocorrelation(changes->volatility, acfg.acf_max_lag);
  } catch (const std::exception& e) {
    out.failures["acf"] = e.what();
  }
  try {
    out.granger = granger_pipeline(stationary_pair(trace, cfg, acfg.volatility_basis), acfg);
  } catch (const std::exception& e) {
    out.failures["granger"] = e.what();
  }
  return out;
}

CapacityReport aggregate_capacity(double capacity, const std::vector<RunAnalysis>& runs,
                                  const AnalysisConfig& acfg, std::size_t capacities_tested) {
  CapacityReport rep;
  rep.capacity = capacity;
  rep.runs = static_cast<int>(runs.size());

  std::vector<double> rates, errors, sigmas, pooled;
  std::vector<std::vector<double>> acfs;
  std::vector<double> bands;
  for (const auto& r : runs) {
    if (!r.failures.empty()) ++rep.failed_runs;
    if (r.failures.contains("convergence")) continue;
    rates.push_back(r.mean_rate);
    errors.push_back(r.utilisation_error);
    if (r.sigma_rate) sigmas.push_back(*r.sigma_rate);
    pooled.insert(pooled.end(), r.abs_deltas.begin(), r.abs_deltas.end());
    if (r.acf) {
      acfs.push_back(r.acf->r);
      bands.push_back(r.acf->band);
    }
    if (r.granger) {
      rep.granger_p.push_back(r.granger->p_value);
      rep.granger_lags.push_back(r.granger->lag);
    }
  }
  std::tie(rep.mean_rate, rep.std_rate) = mean_and_std(rates);
  std::tie(rep.mean_error, rep.std_error) = mean_and_std(errors);
  if (!sigmas.empty()) rep.sigma_rate = mean_and_std(sigmas).first;

  for (double f : acfg.tail_fractions) {
    HillEstimate h;
    h.tail_fraction = f;
    try {
      h.alpha = hill_estimator(pooled, f);
    } catch (const std::exception& e) {
      h.error = e.what();
    }
    rep.hill.push_back(h);
  }

  if (!acfs.empty()) {
    rep.mean_acf.assign(acfs.front().size(), 0.0);
    for (const auto& r : acfs)
      for (std::size_t k = 0; k < r.size(); ++k) rep.mean_acf[k] += r[k] / static_cast<double>(acfs.size());
    rep.acf_band = mean_and_std(bands).first;
  }

  if (!rep.granger_p.empty()) {
    std::vector<double> ps = rep.granger_p;
    for (double& p : ps) p = std::max(p, std::numeric_limits<double>::min());
    rep.hmp = harmonic_mean_p(ps);
    rep.hmp_adjusted = bonferroni_adjust(*rep.hmp, capacities_tested);
    rep.granger_significant = *rep.hmp_adjusted < acfg.alpha;
  }
  return rep;
}

double percentile(std::vector<double> values, double prob) {
  if (values.empty()) throw DomainError("percentile of empty sample");
  std::sort(values.begin(), values.end());
  return sorted_quantile(values, prob);
}

std::vector<int> aic_ranks(const std::vector<double>& aic) {
  std::vector<std::size_t> order(aic.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return aic[a] < aic[b]; });
  std::vector<int> ranks(aic.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

}  // namespace elfarol
