#include "elfarol/game.hpp"

#include <cmath>
#include <string>

namespace elfarol {

void GameConfig::validate() const {
  if (n_agents < 1) throw ConfigError("n_agents must be positive");
  if (!(capacity > 0.0 && capacity < 1.0)) throw ConfigError("capacity must lie in (0, 1)");
  if (!(u_enter > u_exit && u_exit > u_overcrowded))
    throw ConfigError("payoffs must satisfy U_enter > U_exit > U_overcrowded");
  if (rounds < 1) throw ConfigError("rounds must be positive");
  if (burn_in < 0 || burn_in >= rounds) throw ConfigError("burn_in must lie in [0, rounds)");
}

void AttendanceHistory::append(int attendance) {
  if (attendance < 0 || attendance > n_agents_)
    throw DomainError("attendance " + std::to_string(attendance) + " outside [0, " +
                      std::to_string(n_agents_) + "]");
  counts_.push_back(attendance);
}

double payoff(Action action, int others_attending, const GameConfig& cfg) {
  if (others_attending < 0 || others_attending > cfg.n_agents - 1)
    throw DomainError("others_attending outside [0, N-1]");
  if (action == Action::Exit) return cfg.u_exit;
  return cfg.under_capacity(others_attending) ? cfg.u_enter : cfg.u_overcrowded;
}

double utilisation_error(std::span<const int> attendance, const GameConfig& cfg) {
  const auto start = static_cast<std::size_t>(cfg.burn_in);
  if (attendance.size() <= start) throw DomainError("no rounds after burn-in");
  const double n = cfg.n_agents;
  double sum = 0.0;
  for (std::size_t t = start; t < attendance.size(); ++t)
    sum += std::abs(attendance[t] / n - cfg.capacity);
  return sum / static_cast<double>(attendance.size() - start);
}

}  // namespace elfarol
