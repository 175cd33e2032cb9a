#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/fisher_f.hpp>

#include "elfarol/errors.hpp"

namespace elfarol {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject_at_95 = false;
};

/// Unit-root test outcome plus the augmentation lag picked by AIC.
struct AdfResult : TestResult {
  int lags = 0;
  double critical_5pct = 0.0;
};

/// output[t] = input[t + 1] - input[t]. Throws DomainError below two values.
std::vector<double> difference(std::span<const double> series);

/// floor(12 (T / 100)^{1/4}).
int schwert_max_lag(std::size_t n);

/**
 * Augmented Dickey-Fuller test with a constant: Delta y_t on y_{t-1}, p lagged
 * differences and an intercept, p chosen by AIC over 0..max_lag on a common sample and
 * then refitted on all available rows. The t statistic on y_{t-1} is read against
 * Fuller's table; p-values interpolate linearly between tabulated quantiles and are
 * clamped to [0.01, 0.99]. Null: unit root.
 * Throws DomainError for fewer than 25 values or a constant series.
 */
AdfResult adf_test(std::span<const double> series, int max_lag);

/// floor(4 (T / 100)^{1/4}).
int kpss_default_bandwidth(std::size_t n);

/**
 * KPSS level-stationarity test with a Bartlett-kernel long-run variance. p-values
 * interpolate the asymptotic table and are clamped to [0.01, 0.10]. Null: stationary.
 * A negative bandwidth selects kpss_default_bandwidth.
 * Throws DomainError for fewer than 25 values or zero variance.
 */
TestResult kpss_test(std::span<const double> series, int bandwidth = -1);

/// n / sum(1 / p_i). Throws DomainError when empty or any p is outside (0, 1].
double harmonic_mean_p(std::span<const double> p_values);

/// min(1, p * tests).
double bonferroni_adjust(double p, std::size_t tests);

/// Diversity-change (x) and volatility-change (y) series aligned by round.
template <typename Scalar = double>
struct BivariateSeries {
  VectorX<Scalar> x;
  VectorX<Scalar> y;

  /// Throws DomainError unless the series have equal length >= 20 and finite entries.
  void validate() const {
    if (x.size() != y.size()) throw DomainError("bivariate series lengths differ");
    if (x.size() < 20) throw DomainError("bivariate series needs at least 20 observations");
    if (!x.allFinite() || !y.allFinite()) throw DomainError("bivariate series has missing values");
  }

  /// T x 2 matrix with x in column 0 and y in column 1.
  [[nodiscard]] MatrixX<Scalar> matrix() const {
    MatrixX<Scalar> m(x.size(), 2);
    m.col(0) = x;
    m.col(1) = y;
    return m;
  }
};

template <typename Scalar>
BivariateSeries<Scalar> make_bivariate(std::span<const Scalar> x, std::span<const Scalar> y) {
  BivariateSeries<Scalar> s;
  s.x = Eigen::Map<const VectorX<Scalar>>(x.data(), static_cast<Eigen::Index>(x.size()));
  s.y = Eigen::Map<const VectorX<Scalar>>(y.data(), static_cast<Eigen::Index>(y.size()));
  s.validate();
  return s;
}

template <typename Scalar>
struct LeastSquaresFit {
  MatrixX<Scalar> coefficients;  ///< one column per response
  MatrixX<Scalar> residuals;
  VectorX<Scalar> rss;
};

/// Multi-response least squares via column-pivoting QR.
/// Throws NumericalError when the regressors are rank deficient.
template <typename Scalar>
LeastSquaresFit<Scalar> least_squares(const MatrixX<Scalar>& regressors,
                                      const MatrixX<Scalar>& responses) {
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(regressors);
  if (qr.rank() < regressors.cols())
    throw NumericalError("singular regressor matrix: rank " + std::to_string(qr.rank()) +
                         " of " + std::to_string(regressors.cols()) + " columns");
  LeastSquaresFit<Scalar> fit;
  fit.coefficients = qr.solve(responses);
  fit.residuals = responses - regressors * fit.coefficients;
  fit.rss = fit.residuals.colwise().squaredNorm().transpose();
  return fit;
}

/// Vector autoregression y_t = c + A_1 y_{t-1} + ... + A_L y_{t-L} + e_t.
template <typename Scalar = double>
struct VarModel {
  int lag = 1;
  VectorX<Scalar> intercept;
  std::vector<MatrixX<Scalar>> coefficients;  ///< A_1 .. A_L
  MatrixX<Scalar> sigma;     ///< residual covariance, degrees-of-freedom corrected
  MatrixX<Scalar> sigma_ml;  ///< residual covariance divided by the sample size
  MatrixX<Scalar> residuals;
  Eigen::Index n_obs = 0;

  [[nodiscard]] Eigen::Index channels() const { return intercept.size(); }
};

/// Regressor block [1, y_{t-1}, ..., y_{t-L}] for targets t = first .. T-1.
template <typename Scalar>
MatrixX<Scalar> lagged_design(const MatrixX<Scalar>& data, int lag, Eigen::Index first) {
  const Eigen::Index k = data.cols();
  const Eigen::Index n = data.rows() - first;
  MatrixX<Scalar> design(n, 1 + k * lag);
  design.col(0).setOnes();
  for (int j = 1; j <= lag; ++j)
    design.block(0, 1 + k * (j - 1), n, k) = data.block(first - j, 0, n, k);
  return design;
}

/// Equation-by-equation least squares VAR(lag) using targets first .. T-1.
template <typename Scalar>
VarModel<Scalar> fit_var(const MatrixX<Scalar>& data, int lag, Eigen::Index first) {
  if (lag < 1) throw DomainError("VAR lag must be at least 1");
  if (first < lag) throw DomainError("VAR estimation window starts before the lags exist");
  const Eigen::Index k = data.cols();
  const Eigen::Index n = data.rows() - first;
  const Eigen::Index params = 1 + k * lag;
  if (n <= params) throw DomainError("VAR sample too short for the lag order");

  const MatrixX<Scalar> design = lagged_design(data, lag, first);
  const MatrixX<Scalar> targets = data.bottomRows(n);
  auto fit = least_squares<Scalar>(design, targets);

  VarModel<Scalar> model;
  model.lag = lag;
  model.n_obs = n;
  model.intercept = fit.coefficients.row(0).transpose();
  for (int j = 0; j < lag; ++j)
    model.coefficients.push_back(fit.coefficients.block(1 + k * j, 0, k, k).transpose());
  const MatrixX<Scalar> cross = fit.residuals.transpose() * fit.residuals;
  model.sigma_ml = cross / static_cast<Scalar>(n);
  model.sigma = cross / static_cast<Scalar>(n - params);
  model.residuals = std::move(fit.residuals);
  return model;
}

/// VAR(lag) on the full sample. Throws DomainError unless length > 2 * lag + 10.
template <typename Scalar>
VarModel<Scalar> fit_var(const BivariateSeries<Scalar>& series, int lag) {
  series.validate();
  if (series.x.size() <= 2 * lag + 10) throw DomainError("series too short for VAR lag");
  return fit_var<Scalar>(series.matrix(), lag, lag);
}

template <typename Scalar = double>
struct LagSelection {
  int lag = 1;
  std::vector<Scalar> aic;  ///< aic[i] belongs to lag i + 1
};

/**
 * AIC(L) = ln det Sigma_ML(L) + 2 k (k L + 1) / n for L = 1 .. max_lag, every candidate
 * fitted on the same targets max_lag .. T-1. Ties resolve to the smaller lag.
 */
template <typename Scalar>
LagSelection<Scalar> select_lag(const MatrixX<Scalar>& data, int max_lag) {
  if (max_lag < 1) throw DomainError("max_lag must be at least 1");
  if (data.rows() <= 2 * max_lag + 10) throw DomainError("series too short for max_lag");
  LagSelection<Scalar> out;
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const auto k = static_cast<Scalar>(data.cols());
  for (int lag = 1; lag <= max_lag; ++lag) {
    const VarModel<Scalar> m = fit_var<Scalar>(data, lag, max_lag);
    const Scalar det = m.sigma_ml.determinant();
    if (!(det > Scalar(0))) throw NumericalError("degenerate residual covariance in lag selection");
    const Scalar aic = std::log(det) + Scalar(2) * k * (k * lag + 1) / static_cast<Scalar>(m.n_obs);
    out.aic.push_back(aic);
    if (aic < best) {
      best = aic;
      out.lag = lag;
    }
  }
  return out;
}

template <typename Scalar>
LagSelection<Scalar> select_lag(const BivariateSeries<Scalar>& series, int max_lag) {
  series.validate();
  return select_lag<Scalar>(series.matrix(), max_lag);
}

/**
 * F test of "cause does not Granger-cause effect": the effect equation with L lags of
 * both channels against the one without the cause lags, targets L .. T-1, with
 * (L, n - 2L - 1) degrees of freedom.
 */
template <typename Scalar>
TestResult granger_test(const MatrixX<Scalar>& data, Eigen::Index cause, Eigen::Index effect,
                        int lag) {
  if (lag < 1) throw DomainError("Granger lag must be at least 1");
  const Eigen::Index n = data.rows() - lag;
  const Eigen::Index df_den = n - 2 * lag - 1;
  if (df_den < 1) throw DomainError("series too short for Granger lag");

  MatrixX<Scalar> full(n, 1 + 2 * lag);
  full.col(0).setOnes();
  for (int j = 1; j <= lag; ++j) {
    full.col(j) = data.col(effect).segment(lag - j, n);
    full.col(lag + j) = data.col(cause).segment(lag - j, n);
  }
  const MatrixX<Scalar> target = data.col(effect).tail(n);
  const Scalar rss_full = least_squares<Scalar>(full, target).rss(0);
  const Scalar rss_restricted =
      least_squares<Scalar>(MatrixX<Scalar>(full.leftCols(1 + lag)), target).rss(0);
  const Scalar tol = Scalar(1e-10) * (Scalar(1) + rss_restricted);
  if (rss_full > rss_restricted + tol)
    throw NumericalError("restricted model fits better than the unrestricted one");
  if (!(rss_full > Scalar(0))) throw NumericalError("perfect fit in Granger regression");

  const Scalar gain = std::max(rss_restricted - rss_full, Scalar(0));
  const Scalar f = (gain / lag) / (rss_full / static_cast<Scalar>(df_den));
  boost::math::fisher_f_distribution<Scalar> dist(static_cast<Scalar>(lag),
                                                  static_cast<Scalar>(df_den));
  TestResult out;
  out.statistic = static_cast<double>(f);
  out.p_value = static_cast<double>(boost::math::cdf(boost::math::complement(dist, f)));
  out.reject_at_95 = out.p_value < 0.05;
  return out;
}

/// Diversity change (x) -> volatility change (y).
template <typename Scalar>
TestResult granger_test(const BivariateSeries<Scalar>& series, int lag) {
  series.validate();
  return granger_test<Scalar>(series.matrix(), 0, 1, lag);
}

template <typename Scalar = double>
struct ImpulseResponse {
  /// theta[h](i, j): response of channel i, h steps after a one-standard-deviation
  /// orthogonalized shock to channel j.
  std::vector<MatrixX<Scalar>> theta;
  Scalar spectral_radius = 0;
  bool stable = true;

  /// Response path of `channel` to a shock in `shock`, h = 0 .. horizon.
  [[nodiscard]] std::vector<Scalar> path(Eigen::Index channel, Eigen::Index shock) const {
    std::vector<Scalar> out;
    out.reserve(theta.size());
    for (const auto& m : theta) out.push_back(m(channel, shock));
    return out;
  }
};

/// Largest eigenvalue modulus of the companion matrix.
template <typename Scalar>
Scalar companion_spectral_radius(const VarModel<Scalar>& model) {
  const Eigen::Index k = model.channels();
  const Eigen::Index dim = k * model.lag;
  MatrixX<Scalar> companion = MatrixX<Scalar>::Zero(dim, dim);
  for (int j = 0; j < model.lag; ++j) companion.block(0, k * j, k, k) = model.coefficients[j];
  if (model.lag > 1) companion.block(k, 0, dim - k, dim - k).setIdentity();
  Eigen::EigenSolver<MatrixX<Scalar>> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/**
 * Orthogonalized impulse responses Theta_h = Psi_h P with P the lower Cholesky factor of
 * sigma (channel order fixes identification) and Psi_h = sum_j A_j Psi_{h-j}, Psi_0 = I.
 * Unstable models are flagged, not rejected.
 */
template <typename Scalar>
ImpulseResponse<Scalar> impulse_response(const VarModel<Scalar>& model, int horizon) {
  if (horizon < 1) throw DomainError("IRF horizon must be at least 1");
  const Eigen::Index k = model.channels();
  Eigen::LLT<MatrixX<Scalar>> llt(model.sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("residual covariance not positive definite");
  const MatrixX<Scalar> factor = llt.matrixL();

  std::vector<MatrixX<Scalar>> psi;
  psi.push_back(MatrixX<Scalar>::Identity(k, k));
  for (int h = 1; h <= horizon; ++h) {
    MatrixX<Scalar> next = MatrixX<Scalar>::Zero(k, k);
    for (int j = 1; j <= std::min(h, model.lag); ++j)
      next.noalias() += model.coefficients[j - 1] * psi[h - j];
    psi.push_back(std::move(next));
  }

  ImpulseResponse<Scalar> out;
  out.theta.reserve(psi.size());
  for (const auto& p : psi) out.theta.push_back(p * factor);
  out.spectral_radius = companion_spectral_radius(model);
  out.stable = out.spectral_radius < Scalar(1);
  return out;
}

}  // namespace elfarol
