#include "elfarol/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "elfarol/critical_values.hpp"

namespace elfarol {

std::vector<double> difference(std::span<const double> series) {
  if (series.size() < 2) throw DomainError("differencing needs at least two values");
  std::vector<double> out(series.size() - 1);
  for (std::size_t t = 0; t + 1 < series.size(); ++t) out[t] = series[t + 1] - series[t];
  return out;
}

int schwert_max_lag(std::size_t n) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

int kpss_default_bandwidth(std::size_t n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace {

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

void require_variation(std::span<const double> series, const char* what) {
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (!(*hi > *lo)) throw DomainError(std::string(what) + " undefined for a constant series");
}

// Dickey-Fuller quantiles at sample size n, interpolated linearly in 1/n between rows.
std::array<double, 8> dickey_fuller_quantiles(double n) {
  using namespace critical_values;
  const double inv = 1.0 / n;
  auto inv_size = [](std::size_t row) {
    return kDickeyFullerSizes[row] > 0 ? 1.0 / kDickeyFullerSizes[row] : 0.0;
  };
  if (inv >= inv_size(0)) return kDickeyFullerConstant[0];
  for (std::size_t row = 1; row < kDickeyFullerSizes.size(); ++row) {
    const double upper = inv_size(row - 1);
    const double lower = inv_size(row);
    if (inv >= lower) {
      const double w = (inv - lower) / (upper - lower);
      std::array<double, 8> q{};
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = w * kDickeyFullerConstant[row - 1][i] + (1.0 - w) * kDickeyFullerConstant[row][i];
      return q;
    }
  }
  return kDickeyFullerConstant.back();
}

// Piecewise-linear CDF through tabulated (quantile, probability) pairs, clamped at the ends.
double interpolate_probability(std::span<const double> quantiles, std::span<const double> probs,
                               double x) {
  if (x <= quantiles.front()) return probs.front();
  if (x >= quantiles.back()) return probs.back();
  for (std::size_t i = 1; i < quantiles.size(); ++i) {
    if (x <= quantiles[i]) {
      const double w = (x - quantiles[i - 1]) / (quantiles[i] - quantiles[i - 1]);
      return probs[i - 1] + w * (probs[i] - probs[i - 1]);
    }
  }
  return probs.back();
}

struct AdfFit {
  double t_stat = 0.0;
  double aic = 0.0;
  Eigen::Index n = 0;
};

// Delta y_t on [1, y_{t-1}, Delta y_{t-1}, ..., Delta y_{t-p}] for t = first .. T-1.
AdfFit adf_regression(std::span<const double> y, std::span<const double> dy, int p,
                      std::size_t first) {
  const auto n = static_cast<Eigen::Index>(y.size() - first);
  Matrix design(n, 2 + p);
  Matrix target(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t t = first + static_cast<std::size_t>(i);
    target(i, 0) = dy[t - 1];
    design(i, 0) = 1.0;
    design(i, 1) = y[t - 1];
    for (int j = 1; j <= p; ++j) design(i, 1 + j) = dy[t - 1 - static_cast<std::size_t>(j)];
  }
  const auto fit = least_squares<double>(design, target);
  const auto params = static_cast<double>(design.cols());
  const double dof = static_cast<double>(n) - params;
  if (!(dof > 0)) throw DomainError("ADF regression has no residual degrees of freedom");
  const double s2 = fit.rss(0) / dof;
  const Matrix xtx_inv =
      (design.transpose() * design).ldlt().solve(Matrix::Identity(design.cols(), design.cols()));
  AdfFit out;
  out.n = n;
  out.t_stat = fit.coefficients(1, 0) / std::sqrt(s2 * xtx_inv(1, 1));
  out.aic = static_cast<double>(n) * std::log(fit.rss(0) / static_cast<double>(n)) + 2.0 * params;
  return out;
}

}  // namespace

AdfResult adf_test(std::span<const double> series, int max_lag) {
  if (series.size() < 25) throw DomainError("ADF test needs at least 25 values");
  require_variation(series, "ADF test");
  if (max_lag < 0) throw DomainError("ADF max_lag must be non-negative");
  // Keep at least ten residual degrees of freedom on the common sample.
  const int usable = static_cast<int>(series.size()) / 2 - 3;
  max_lag = std::min(max_lag, std::max(usable, 0));

  const std::vector<double> dy = difference(series);
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= max_lag; ++p) {
    const AdfFit fit = adf_regression(series, dy, p, static_cast<std::size_t>(max_lag) + 1);
    if (fit.aic < best_aic) {
      best_aic = fit.aic;
      best_lag = p;
    }
  }
  const AdfFit fit = adf_regression(series, dy, best_lag, static_cast<std::size_t>(best_lag) + 1);
  const auto q = dickey_fuller_quantiles(static_cast<double>(fit.n));

  AdfResult out;
  out.statistic = fit.t_stat;
  out.lags = best_lag;
  out.critical_5pct = q[2];
  out.p_value = interpolate_probability(q, critical_values::kDickeyFullerProbs, fit.t_stat);
  out.reject_at_95 = fit.t_stat < out.critical_5pct;
  return out;
}

TestResult kpss_test(std::span<const double> series, int bandwidth) {
  const std::size_t n = series.size();
  if (n < 25) throw DomainError("KPSS test needs at least 25 values");
  require_variation(series, "KPSS test");
  if (bandwidth < 0) bandwidth = kpss_default_bandwidth(n);
  bandwidth = std::min<int>(bandwidth, static_cast<int>(n) - 1);

  const double m = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> e(n);
  for (std::size_t t = 0; t < n; ++t) e[t] = series[t] - m;

  double partial = 0.0;
  double sum_sq_partial = 0.0;
  for (double v : e) {
    partial += v;
    sum_sq_partial += partial * partial;
  }
  double long_run = 0.0;
  for (double v : e) long_run += v * v;
  for (int s = 1; s <= bandwidth; ++s) {
    double cov = 0.0;
    for (std::size_t t = static_cast<std::size_t>(s); t < n; ++t)
      cov += e[t] * e[t - static_cast<std::size_t>(s)];
    long_run += 2.0 * (1.0 - s / (bandwidth + 1.0)) * cov;
  }
  long_run /= static_cast<double>(n);
  if (!(long_run > 0.0)) throw DomainError("KPSS long-run variance is not positive");

  const double nd = static_cast<double>(n);
  TestResult out;
  out.statistic = sum_sq_partial / (nd * nd * long_run);
  // Upper-tail table: statistic increases as the probability falls.
  using namespace critical_values;
  out.p_value = interpolate_probability(kKpssLevel, kKpssProbs, out.statistic);
  out.reject_at_95 = out.statistic > kKpssLevel[1];
  return out;
}

double harmonic_mean_p(std::span<const double> p_values) {
  if (p_values.empty()) throw DomainError("harmonic mean of no p-values");
  double inv = 0.0;
  for (double p : p_values) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("p-values must lie in (0, 1]");
    inv += 1.0 / p;
  }
  return static_cast<double>(p_values.size()) / inv;
}

double bonferroni_adjust(double p, std::size_t tests) {
  return std::min(1.0, p * static_cast<double>(tests));
}

}  // namespace elfarol
