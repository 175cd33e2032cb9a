#pragma once

#include <array>

// Tabulated null distributions for the unit-root and stationarity tests. The same numbers
// ship as data/dickey_fuller_constant.csv and data/kpss_level.csv.

namespace elfarol::critical_values {

/// Left-tail probabilities at which the Dickey-Fuller quantiles are tabulated.
inline constexpr std::array<double, 8> kDickeyFullerProbs = {0.01, 0.025, 0.05, 0.10,
                                                             0.90, 0.95,  0.975, 0.99};

/// Sample sizes of the table rows; the last row is the asymptotic distribution.
inline constexpr std::array<double, 6> kDickeyFullerSizes = {25, 50, 100, 250, 500, 0};

/// Fuller's percentiles of the t statistic on y_{t-1}, regression with a constant and no
/// trend. Row i corresponds to kDickeyFullerSizes[i] (0 = infinity).
inline constexpr std::array<std::array<double, 8>, 6> kDickeyFullerConstant = {{
    {-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72},
    {-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66},
    {-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63},
    {-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62},
    {-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61},
    {-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60},
}};

/// Upper-tail probabilities and asymptotic critical values of the KPSS level statistic.
inline constexpr std::array<double, 4> kKpssProbs = {0.10, 0.05, 0.025, 0.01};
inline constexpr std::array<double, 4> kKpssLevel = {0.347, 0.463, 0.574, 0.739};

}  // namespace elfarol::critical_values
