#include "elfarol/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace elfarol {

double as_predict(const AsStrategy& strategy, std::span<const int> history,
                  const GameConfig& cfg) {
  const double n = cfg.n_agents;
  double prediction = strategy.weights(0) * n;
  if (!history.empty()) {
    const auto len = static_cast<std::ptrdiff_t>(history.size());
    for (int i = 1; i <= strategy.memory(); ++i) {
      const std::ptrdiff_t idx = std::max<std::ptrdiff_t>(len - i, 0);
      prediction += strategy.weights(i) * history[static_cast<std::size_t>(idx)];
    }
  }
  return std::clamp(prediction, 0.0, n);
}

AsAgent::AsAgent(std::vector<AsStrategy> strategies) : strategies_(std::move(strategies)) {
  if (strategies_.empty()) throw ConfigError("AS agent needs at least one strategy");
  const auto len = strategies_.front().weights.size();
  if (len < 1) throw ConfigError("AS strategy needs a constant weight");
  for (const auto& s : strategies_)
    if (s.weights.size() != len) throw ConfigError("AS strategies differ in length");
}

Action AsAgent::decide(const AttendanceHistory& history, const GameConfig& cfg, Rng&) {
  chosen_ = as_select_strategy(*this, history.view(), cfg);
  return as_decide(chosen(), history.view(), cfg);
}

std::size_t as_select_strategy(const AsAgent& agent, std::span<const int> history,
                               const GameConfig& cfg) {
  const std::size_t len = history.size();
  if (len == 0) return 0;
  const std::size_t evaluated = std::min<std::size_t>(static_cast<std::size_t>(agent.memory()),
                                                      len);
  std::size_t best = 0;
  double best_error = std::numeric_limits<double>::infinity();
  const auto& strategies = agent.strategies();
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    double error = 0.0;
    for (std::size_t t = len - evaluated; t < len; ++t)
      error += std::abs(as_predict(strategies[s], history.first(t), cfg) - history[t]);
    if (error < best_error) {
      best_error = error;
      best = s;
    }
  }
  return best;
}

Action as_decide(const AsStrategy& chosen, std::span<const int> history, const GameConfig& cfg) {
  return cfg.under_capacity(as_predict(chosen, history, cfg)) ? Action::Enter : Action::Exit;
}

void AsRanges::validate() const {
  if (memory < 1) throw ConfigError("AS memory must be positive");
  if (strategies < 1) throw ConfigError("AS strategy count must be positive");
  if (!(weight_lo <= weight_hi)) throw ConfigError("AS weight range has lo > hi");
  if (weight_lo < -1.0 || weight_hi > 1.0) throw ConfigError("AS weights must lie in [-1, 1]");
}

std::vector<AsAgent> spawn_as_population(int n, const AsRanges& ranges, Rng& rng) {
  ranges.validate();
  if (n < 1) throw ConfigError("population size must be positive");
  std::vector<AsAgent> agents;
  agents.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<AsStrategy> strategies(static_cast<std::size_t>(ranges.strategies));
    for (auto& s : strategies) {
      s.weights.resize(ranges.memory + 1);
      for (Eigen::Index j = 0; j < s.weights.size(); ++j)
        s.weights(j) = uniform(rng, ranges.weight_lo, ranges.weight_hi);
    }
    agents.emplace_back(std::move(strategies));
  }
  return agents;
}

Action NoiseTrader::decide(const AttendanceHistory&, const GameConfig&, Rng& rng) const {
  return noise_decide(*this, rng);
}

Action noise_decide(const NoiseTrader& agent, Rng& rng) {
  return bernoulli(rng, agent.entry_probability) ? Action::Enter : Action::Exit;
}

std::vector<NoiseTrader> spawn_noise_population(int n, double entry_probability) {
  if (!(entry_probability >= 0.0 && entry_probability <= 1.0))
    throw ConfigError("noise entry probability must lie in [0, 1]");
  if (n < 1) throw ConfigError("population size must be positive");
  return std::vector<NoiseTrader>(static_cast<std::size_t>(n), NoiseTrader{entry_probability});
}

}  // namespace elfarol
