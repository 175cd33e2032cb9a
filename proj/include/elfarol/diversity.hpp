#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elfarol/baseline.hpp"
#include "elfarol/brats.hpp"

namespace elfarol {

enum class DiversityKind { BetaResources, StrategyCodes };

struct DiversitySample {
  std::vector<double> values;
  DiversityKind kind = DiversityKind::BetaResources;
};

/// Quantile with linear interpolation between order statistics of a sorted sample.
double sorted_quantile(std::span<const double> sorted, double prob);

/**
 * Freedman-Diaconis bin count: W = 2 IQR / cbrt(n), bins = ceil((max - min) / W).
 * All-equal values give 1 bin; zero IQR with a non-zero range falls back to Sturges,
 * ceil(log2 n) + 1. Fewer than two values give 1 bin.
 */
int fd_bin_count(std::span<const double> values);

/// Shannon entropy of an equal-width histogram over [min, max] with fd_bin_count bins,
/// divided by log2(bins). Single-bin histograms score 0. Throws DomainError when empty
/// or when a value is not finite.
double normalized_entropy(std::span<const double> values);
double normalized_entropy(const DiversitySample& sample);

/// Sign bits (weight >= 0 -> 1), most significant first, read as an unsigned integer.
std::uint64_t strategy_to_decimal(const AsStrategy& strategy);

DiversitySample beta_sample(std::span<const BratsAgent> agents);
DiversitySample strategy_sample(std::span<const AsAgent> agents);

/// Normalized entropy of the population's beta values (BRATS) or chosen-strategy codes
/// (AS). Throws DomainError when the population type does not match `kind`.
double population_diversity(std::span<const BratsAgent> agents, DiversityKind kind);
double population_diversity(std::span<const AsAgent> agents, DiversityKind kind);

}  // namespace elfarol
