#pragma once

#include <limits>
#include <vector>

#include "elfarol/game.hpp"
#include "elfarol/random.hpp"

namespace elfarol {

/// Distribution over {Enter, Exit}.
struct ActionDistribution {
  double enter = 0.5;
  double exit = 0.5;

  [[nodiscard]] double operator[](Action a) const { return a == Action::Enter ? enter : exit; }
};

/// Reasoning stops at the first level whose precision beta * gamma^k falls below this.
inline constexpr double kPrecisionThreshold = 1e-3;
inline constexpr int kDefaultMaxDepth = 25;
inline constexpr int kDefaultPriorWindow = 10;

struct BratsParams {
  double beta0 = 0.0;
  double gamma = 0.5;
  double eta = 0.01;
  int prior_window = kDefaultPriorWindow;
  int max_depth = kDefaultMaxDepth;
  double epsilon = kPrecisionThreshold;
  double beta_ceiling = std::numeric_limits<double>::infinity();
};

/**
 * Bounded-rational recursive reasoner. Precision beta starts at beta0 and grows
 * linearly by eta per learning step; gamma discounts precision at each deeper level
 * of "I think that you think" reasoning.
 */
class BratsAgent {
 public:
  /// Throws ConfigError on beta0 < 0, gamma outside [0, 1), eta <= 0, prior_window < 1,
  /// max_depth < 1, epsilon <= 0 or beta_ceiling < beta0.
  explicit BratsAgent(const BratsParams& params);

  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double beta0() const { return params_.beta0; }
  [[nodiscard]] double gamma() const { return params_.gamma; }
  [[nodiscard]] double eta() const { return params_.eta; }
  [[nodiscard]] const BratsParams& params() const { return params_; }

  /// beta <- min(beta + eta, beta_ceiling).
  void learn();

  /// Samples an action from qh_decide.
  Action decide(const AttendanceHistory& history, const GameConfig& cfg, Rng& rng) const;

 private:
  BratsParams params_;
  double beta_;
};

/// One level of the recursion, kept for diagnostics.
struct QhLevel {
  int level = 0;
  double precision = 0.0;  // beta * gamma^level
  ActionDistribution f;
  double log_partition = 0.0;  // log Z_k
  /// log of Z_{k+1}^{1/gamma}. Action-independent here, so it cancels in f; zero when
  /// gamma == 0 or at the prior level.
  double log_future_contribution = 0.0;

  [[nodiscard]] double partition() const;
};

struct QhTrace {
  ActionDistribution decision;
  /// levels[0] is the agent's own decision; levels.back() is the prior level.
  std::vector<QhLevel> levels;
};

/**
 * Level-0 belief: over the last min(window, |history|) rounds count the w rounds in which
 * entering was profitable (attendance strictly below c * N); p[Enter] = (w + 1) / (m + 2).
 */
ActionDistribution prior_belief(const AttendanceHistory& history, const GameConfig& cfg,
                                int window);

/// P(X < c * N) for X ~ Binomial(N - 1, q), by direct summation of the binomial terms.
double crowd_probability(double q, const GameConfig& cfg);

/// Number of reasoning levels: count of k in [0, max_depth) with beta * gamma^k >= epsilon.
int reasoning_depth(double beta, double gamma, double epsilon, int max_depth);

/**
 * Quantal-hierarchy decision.
 *
 * With D = reasoning_depth(...), level D is the prior. Each shallower level k models the
 * other agents as entering independently with f_{k+1}[Enter] and responds with
 *   f_k[a] = p[a] exp(beta gamma^k U_k[a]) / Z_k.
 * D = 0 returns the prior unchanged; gamma = 0 gives the single softmax over the prior.
 */
ActionDistribution qh_decide(const BratsAgent& agent, const AttendanceHistory& history,
                             const GameConfig& cfg);

/// Same recursion starting from an explicit prior, with the per-level record.
QhTrace qh_trace(double beta, const BratsParams& params, const ActionDistribution& prior,
                 const GameConfig& cfg);

/// Uniform draw ranges for the population's parameters.
struct BratsRanges {
  double beta0_lo = 0.0, beta0_hi = 0.1;
  double gamma_lo = 0.1, gamma_hi = 0.5;
  double eta_lo = 0.1, eta_hi = 0.4;
  int prior_window = kDefaultPriorWindow;
  int max_depth = kDefaultMaxDepth;
  double epsilon = kPrecisionThreshold;
  double beta_ceiling = std::numeric_limits<double>::infinity();

  /// Throws ConfigError on reversed bounds or bounds outside the agent invariants.
  void validate() const;
};

/// n agents; per agent the draws are consumed in the order beta0, gamma, eta.
std::vector<BratsAgent> spawn_population(int n, const BratsRanges& ranges, Rng& rng);

}  // namespace elfarol
