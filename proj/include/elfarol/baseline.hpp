#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "elfarol/game.hpp"
#include "elfarol/random.hpp"

namespace elfarol {

/// Linear attendance predictor: weights(0) scales N, weights(i) multiplies A_{t-i}.
struct AsStrategy {
  Eigen::VectorXd weights;

  [[nodiscard]] int memory() const { return static_cast<int>(weights.size()) - 1; }
};

/// Predicted attendance for the round following `history`, clamped to [0, N].
/// Lags older than the first round reuse the earliest attendance; with no history at
/// all the lag terms contribute nothing.
double as_predict(const AsStrategy& strategy, std::span<const int> history,
                  const GameConfig& cfg);

/// Adaptive-strategies agent holding a fixed ecology of predictors.
class AsAgent {
 public:
  /// Throws ConfigError when the set is empty or strategies differ in length.
  explicit AsAgent(std::vector<AsStrategy> strategies);

  [[nodiscard]] const std::vector<AsStrategy>& strategies() const { return strategies_; }
  [[nodiscard]] int memory() const { return strategies_.front().memory(); }
  [[nodiscard]] std::size_t chosen_index() const { return chosen_; }
  [[nodiscard]] const AsStrategy& chosen() const { return strategies_[chosen_]; }

  /// Re-selects the best strategy on the current history, then applies as_decide.
  Action decide(const AttendanceHistory& history, const GameConfig& cfg, Rng& rng);

 private:
  std::vector<AsStrategy> strategies_;
  std::size_t chosen_ = 0;
};

/**
 * Index of the strategy with the smallest cumulative absolute prediction error over the
 * last min(M, |history|) rounds, each predicted from the rounds before it. Ties go to
 * the lowest index; an empty history selects index 0.
 */
std::size_t as_select_strategy(const AsAgent& agent, std::span<const int> history,
                               const GameConfig& cfg);

/// Enter iff the prediction is strictly below c * N.
Action as_decide(const AsStrategy& chosen, std::span<const int> history, const GameConfig& cfg);

struct AsRanges {
  int memory = 5;
  int strategies = 10;
  double weight_lo = -1.0;
  double weight_hi = 1.0;

  void validate() const;
};

/// Draws weights agent by agent, strategy by strategy, element by element.
std::vector<AsAgent> spawn_as_population(int n, const AsRanges& ranges, Rng& rng);

/// Enters independently with a fixed probability each round.
struct NoiseTrader {
  double entry_probability = 0.5;

  Action decide(const AttendanceHistory& history, const GameConfig& cfg, Rng& rng) const;
};

Action noise_decide(const NoiseTrader& agent, Rng& rng);

/// Throws ConfigError unless 0 <= q <= 1.
std::vector<NoiseTrader> spawn_noise_population(int n, double entry_probability);

}  // namespace elfarol
