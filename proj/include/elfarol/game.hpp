#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "elfarol/errors.hpp"
#include "elfarol/random.hpp"

namespace elfarol {

/// Serialized as 1 (Enter) / 0 (Exit).
enum class Action : int { Exit = 0, Enter = 1 };

/**
 * Market-entrance game parameters.
 *
 * Entering pays `u_enter` when strictly fewer than capacity * n_agents other agents
 * enter, `u_overcrowded` otherwise. Staying out always pays `u_exit`.
 */
struct GameConfig {
  int n_agents = 100;
  double capacity = 0.6;
  double u_enter = 1.0;
  double u_exit = 0.0;
  double u_overcrowded = -1.0;
  int rounds = 1000;
  int burn_in = 100;

  /// Throws ConfigError unless u_enter > u_exit > u_overcrowded, 0 < capacity < 1,
  /// n_agents >= 1, rounds >= 1 and 0 <= burn_in < rounds.
  void validate() const;

  /// c * N, deliberately not rounded to an integer.
  [[nodiscard]] double crowd_threshold() const {
    return capacity * static_cast<double>(n_agents);
  }

  /// True when `attending` agents is below the crowding threshold.
  [[nodiscard]] bool under_capacity(double attending) const {
    return attending < crowd_threshold();
  }
};

/// Append-only per-round attendance counts.
class AttendanceHistory {
 public:
  explicit AttendanceHistory(int n_agents) : n_agents_(n_agents) {}

  /// Throws DomainError unless 0 <= attendance <= N.
  void append(int attendance);

  [[nodiscard]] std::size_t size() const { return counts_.size(); }
  [[nodiscard]] bool empty() const { return counts_.empty(); }
  [[nodiscard]] int operator[](std::size_t t) const { return counts_[t]; }
  [[nodiscard]] int n_agents() const { return n_agents_; }
  [[nodiscard]] std::span<const int> view() const { return counts_; }

 private:
  int n_agents_;
  std::vector<int> counts_;
};

/// Payoff for one agent given how many *other* agents entered.
/// Throws DomainError unless 0 <= others_attending <= N - 1.
double payoff(Action action, int others_attending, const GameConfig& cfg);

/// Anything that can take part in a round. `decide` sees only past history.
template <typename A>
concept DecisionMaker = requires(A& agent, const AttendanceHistory& history,
                                 const GameConfig& cfg, Rng& rng) {
  { agent.decide(history, cfg, rng) } -> std::same_as<Action>;
};

struct RoundOutcome {
  int attendance = 0;
  std::vector<double> payoffs;
};

/**
 * One synchronous round: every agent decides against the same history, in agent
 * order, drawing from the shared stream. Only after all decisions are collected is
 * attendance tallied, payoffs assigned, and the history extended.
 */
template <DecisionMaker Agent>
RoundOutcome play_round(std::span<Agent> agents, AttendanceHistory& history,
                        const GameConfig& cfg, Rng& rng) {
  std::vector<Action> actions;
  actions.reserve(agents.size());
  for (auto& agent : agents) actions.push_back(agent.decide(history, cfg, rng));

  RoundOutcome out;
  for (Action a : actions) out.attendance += a == Action::Enter ? 1 : 0;
  out.payoffs.reserve(actions.size());
  for (Action a : actions) {
    const int others = out.attendance - (a == Action::Enter ? 1 : 0);
    out.payoffs.push_back(payoff(a, others, cfg));
  }
  history.append(out.attendance);
  return out;
}

/// Mean of |A_t / N - c| over rounds t >= burn_in.
/// Throws DomainError when no rounds remain after burn-in.
double utilisation_error(std::span<const int> attendance, const GameConfig& cfg);

}  // namespace elfarol
