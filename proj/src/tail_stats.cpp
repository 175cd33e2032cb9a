#include "elfarol/tail_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "elfarol/errors.hpp"

namespace elfarol {

ChangeSeries attendance_changes(std::span<const int> attendance, int n_agents,
                                VolatilityBasis basis) {
  if (attendance.size() < 2) throw DomainError("need at least two rounds for changes");
  ChangeSeries out;
  out.deltas.reserve(attendance.size() - 1);
  out.volatility.reserve(attendance.size() - 1);
  for (std::size_t t = 1; t < attendance.size(); ++t) {
    const double delta = attendance[t] - attendance[t - 1];
    out.deltas.push_back(delta);
    if (basis == VolatilityBasis::Capacity) {
      out.volatility.push_back(100.0 * std::abs(delta) / n_agents);
    } else if (attendance[t - 1] > 0) {
      out.volatility.push_back(100.0 * std::abs(delta) / attendance[t - 1]);
    }
  }
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of empty series");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("standard deviation needs two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double sigma_event_rate(std::span<const double> deltas) {
  if (deltas.size() < 2) throw DomainError("3-sigma rate needs at least two changes");
  const double m = mean(deltas);
  const double sd = sample_stddev(deltas);
  if (!(sd > 0.0)) throw DomainError("3-sigma rate undefined for zero spread");
  const auto hits = std::count_if(deltas.begin(), deltas.end(),
                                  [&](double d) { return std::abs(d - m) > 3.0 * sd; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(deltas.size());
}

double hill_estimator_k(std::span<const double> samples, std::size_t k) {
  if (k < 2) throw DomainError("Hill estimator needs k >= 2");
  std::vector<double> positive;
  positive.reserve(samples.size());
  for (double x : samples)
    if (x > 0.0) positive.push_back(x);
  if (positive.size() < k + 1) throw DomainError("too few positive samples for Hill tail");
  std::nth_element(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(k),
                   positive.end(), std::greater<>());
  const double threshold = positive[k];
  const double log_threshold = std::log(threshold);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(positive[i]) - log_threshold;
  if (!(sum > 0.0)) throw DomainError("Hill tail values all equal the threshold");
  return static_cast<double>(k) / sum;
}

double hill_estimator(std::span<const double> samples, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw DomainError("tail fraction must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](double x) { return x > 0.0; }));
  const auto k = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  return hill_estimator_k(samples, k);
}

Autocorrelation autocorrelation(std::span<const double> series, int max_lag) {
  if (max_lag < 0) throw DomainError("max_lag must be non-negative");
  const std::size_t n = series.size();
  if (n <= static_cast<std::size_t>(max_lag) + 2) throw DomainError("series too short for ACF");
  const double m = mean(series);
  double c0 = 0.0;
  for (double x : series) c0 += (x - m) * (x - m);
  if (!(c0 > 0.0)) throw DomainError("ACF undefined for zero variance");

  Autocorrelation out;
  out.r.resize(static_cast<std::size_t>(max_lag) + 1);
  out.r[0] = 1.0;
  for (std::size_t k = 1; k <= static_cast<std::size_t>(max_lag); ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (series[t] - m) * (series[t - k] - m);
    out.r[k] = ck / c0;
  }
  out.band = 1.96 / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace elfarol
