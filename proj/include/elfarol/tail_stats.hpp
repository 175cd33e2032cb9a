#pragma once

#include <span>
#include <vector>

namespace elfarol {

/// Denominator of the per-round volatility percentage.
enum class VolatilityBasis {
  Capacity,            ///< 100 |A_t - A_{t-1}| / N
  PreviousAttendance,  ///< 100 |A_t - A_{t-1}| / A_{t-1}; rounds with A_{t-1} = 0 are skipped
};

struct ChangeSeries {
  std::vector<double> deltas;      ///< A_t - A_{t-1}
  std::vector<double> volatility;  ///< absolute percentage change
};

/// Throws DomainError when fewer than two rounds are given.
ChangeSeries attendance_changes(std::span<const int> attendance, int n_agents,
                                VolatilityBasis basis = VolatilityBasis::Capacity);

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> xs);

/// Percentage of deltas lying more than three sample standard deviations from their mean.
/// Throws DomainError with fewer than two deltas or zero spread.
double sigma_event_rate(std::span<const double> deltas);

/**
 * Hill tail index from the k largest samples: non-positive samples are dropped, the rest
 * sorted descending, and alpha = 1 / ((1/k) sum_{i<=k} ln(X_(i) / X_(k+1))).
 * Throws DomainError when k < 2, fewer than k + 1 positive samples remain, or every tail
 * value equals the threshold.
 */
double hill_estimator_k(std::span<const double> samples, std::size_t k);

/// Hill estimator with k = ceil(tail_fraction * n) over the n positive samples.
double hill_estimator(std::span<const double> samples, double tail_fraction);

struct Autocorrelation {
  std::vector<double> r;  ///< r[0] = 1, r[k] for k = 1..max_lag
  double band = 0.0;      ///< 1.96 / sqrt(T)
};

/// Sample autocorrelation with the biased (1/T) autocovariance. Throws DomainError when
/// T <= max_lag + 2 or the series has zero variance.
Autocorrelation autocorrelation(std::span<const double> series, int max_lag);

}  // namespace elfarol
