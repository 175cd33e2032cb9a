#pragma once

#include <stdexcept>
#include <string>

namespace elfarol {

/// Rejected configuration (bad ranges, violated invariants). Raised before any simulation starts.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside an operation's domain: too few samples, zero variance, out-of-range counts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical breakdown: singular regressors, NaN in a decision distribution.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace elfarol
