#include "elfarol/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace elfarol {

double sorted_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw DomainError("quantile of empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

int fd_bins_sorted(std::span<const double> sorted) {
  if (sorted.size() < 2) return 1;
  const double range = sorted.back() - sorted.front();
  if (!(range > 0.0)) return 1;
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  const double n = static_cast<double>(sorted.size());
  if (!(iqr > 0.0)) return static_cast<int>(std::ceil(std::log2(n))) + 1;
  const double width = 2.0 * iqr / std::cbrt(n);
  // Absorb rounding in range / width so that exact multiples do not gain a bin.
  const double ratio = range / width;
  const double bins = std::ceil(ratio * (1.0 - 1e-12));
  return std::max(1, static_cast<int>(bins));
}

}  // namespace

int fd_bin_count(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return fd_bins_sorted(sorted);
}

double normalized_entropy(std::span<const double> values) {
  if (values.empty()) throw DomainError("entropy of empty sample");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("non-finite diversity value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const int bins = fd_bins_sorted(sorted);
  if (bins <= 1) return 0.0;

  const double lo = sorted.front();
  const double width = (sorted.back() - lo) / bins;
  std::map<int, std::size_t> counts;
  for (double v : sorted) {
    int idx = static_cast<int>(std::floor((v - lo) / width));
    counts[std::clamp(idx, 0, bins - 1)] += 1;
  }
  const double n = static_cast<double>(sorted.size());
  double h = 0.0;
  for (const auto& [bin, count] : counts) {
    const double x = static_cast<double>(count) / n;
    h -= x * std::log2(x);
  }
  return std::clamp(h / std::log2(static_cast<double>(bins)), 0.0, 1.0);
}

double normalized_entropy(const DiversitySample& sample) {
  return normalized_entropy(std::span<const double>(sample.values));
}

std::uint64_t strategy_to_decimal(const AsStrategy& strategy) {
  std::uint64_t code = 0;
  for (Eigen::Index j = 0; j < strategy.weights.size(); ++j)
    code = (code << 1) | (strategy.weights(j) >= 0.0 ? 1U : 0U);
  return code;
}

DiversitySample beta_sample(std::span<const BratsAgent> agents) {
  DiversitySample s{{}, DiversityKind::BetaResources};
  s.values.reserve(agents.size());
  for (const auto& a : agents) s.values.push_back(a.beta());
  return s;
}

DiversitySample strategy_sample(std::span<const AsAgent> agents) {
  DiversitySample s{{}, DiversityKind::StrategyCodes};
  s.values.reserve(agents.size());
  for (const auto& a : agents) s.values.push_back(static_cast<double>(strategy_to_decimal(a.chosen())));
  return s;
}

double population_diversity(std::span<const BratsAgent> agents, DiversityKind kind) {
  if (kind != DiversityKind::BetaResources)
    throw DomainError("BRATS populations are measured by beta resources");
  return normalized_entropy(beta_sample(agents));
}

double population_diversity(std::span<const AsAgent> agents, DiversityKind kind) {
  if (kind != DiversityKind::StrategyCodes)
    throw DomainError("AS populations are measured by strategy codes");
  return normalized_entropy(strategy_sample(agents));
}

}  // namespace elfarol
