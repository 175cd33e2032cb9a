#include "elfarol/brats.hpp"

#include <algorithm>
#include <cmath>

namespace elfarol {

namespace {

void check_params(const BratsParams& p) {
  if (!(p.beta0 >= 0.0)) throw ConfigError("beta0 must be non-negative");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(p.eta > 0.0)) throw ConfigError("eta must be positive");
  if (p.prior_window < 1) throw ConfigError("prior_window must be positive");
  if (p.max_depth < 1) throw ConfigError("max_depth must be positive");
  if (!(p.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(p.beta_ceiling >= p.beta0)) throw ConfigError("beta_ceiling must be >= beta0");
}

// Softmax over two actions weighted by the prior, computed around the larger exponent.
QhLevel respond(int level, double precision, const ActionDistribution& prior, double u_enter,
                double u_exit) {
  const double e_enter = precision * u_enter;
  const double e_exit = precision * u_exit;
  const double top = std::max(e_enter, e_exit);
  const double w_enter = prior.enter * std::exp(e_enter - top);
  const double w_exit = prior.exit * std::exp(e_exit - top);
  const double total = w_enter + w_exit;

  QhLevel out;
  out.level = level;
  out.precision = precision;
  out.f = {w_enter / total, w_exit / total};
  out.log_partition = top + std::log(total);
  if (!std::isfinite(out.f.enter) || !std::isfinite(out.f.exit) ||
      !std::isfinite(out.log_partition))
    throw NumericalError("non-finite value in quantal-hierarchy level");
  return out;
}

}  // namespace

BratsAgent::BratsAgent(const BratsParams& params) : params_(params), beta_(params.beta0) {
  check_params(params_);
}

void BratsAgent::learn() { beta_ = std::min(beta_ + params_.eta, params_.beta_ceiling); }

Action BratsAgent::decide(const AttendanceHistory& history, const GameConfig& cfg,
                          Rng& rng) const {
  const ActionDistribution f = qh_decide(*this, history, cfg);
  return bernoulli(rng, f.enter) ? Action::Enter : Action::Exit;
}

double QhLevel::partition() const { return std::exp(log_partition); }

ActionDistribution prior_belief(const AttendanceHistory& history, const GameConfig& cfg,
                                int window) {
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(std::max(window, 0)),
                                               history.size());
  std::size_t wins = 0;
  for (std::size_t t = history.size() - m; t < history.size(); ++t)
    if (cfg.under_capacity(history[t])) ++wins;
  const double enter = (static_cast<double>(wins) + 1.0) / (static_cast<double>(m) + 2.0);
  return {enter, 1.0 - enter};
}

double crowd_probability(double q, const GameConfig& cfg) {
  const int n = cfg.n_agents - 1;
  const double threshold = cfg.crowd_threshold();
  // Largest x with x < c * N.
  const double ceil_threshold = std::ceil(threshold);
  const int last = static_cast<int>(ceil_threshold) - 1;
  if (last < 0) return 0.0;
  if (last >= n) return 1.0;
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;

  // Terms are accumulated relative to the x = 0 term, exp(log_scale), and rescaled
  // before they overflow, so (1 - q)^n may underflow without losing precision.
  constexpr double kRescale = 1e-250;
  const double step = 250.0 * std::log(10.0);
  const double odds = q / (1.0 - q);
  double log_scale = n * std::log1p(-q);
  double term = 1.0;
  double sum = 0.0;
  for (int x = 0; x <= last; ++x) {
    sum += term;
    term *= odds * static_cast<double>(n - x) / static_cast<double>(x + 1);
    if (term > 1e250) {
      term *= kRescale;
      sum *= kRescale;
      log_scale += step;
    }
  }
  sum = std::exp(std::log(sum) + log_scale);
  return std::clamp(sum, 0.0, 1.0);
}

int reasoning_depth(double beta, double gamma, double epsilon, int max_depth) {
  int depth = 0;
  double precision = beta;
  while (depth < max_depth && precision >= epsilon) {
    ++depth;
    precision *= gamma;
  }
  return depth;
}

QhTrace qh_trace(double beta, const BratsParams& params, const ActionDistribution& prior,
                 const GameConfig& cfg) {
  const int depth = reasoning_depth(beta, params.gamma, params.epsilon, params.max_depth);

  QhTrace trace;
  trace.levels.resize(static_cast<std::size_t>(depth) + 1);
  QhLevel& base = trace.levels.back();
  base.level = depth;
  base.precision = beta * std::pow(params.gamma, depth);
  base.f = prior;

  for (int k = depth - 1; k >= 0; --k) {
    const QhLevel& deeper = trace.levels[static_cast<std::size_t>(k) + 1];
    const double p_ok = crowd_probability(deeper.f.enter, cfg);
    const double u_enter = cfg.u_enter * p_ok + cfg.u_overcrowded * (1.0 - p_ok);
    QhLevel level = respond(k, beta * std::pow(params.gamma, k), prior, u_enter, cfg.u_exit);
    if (params.gamma > 0.0) level.log_future_contribution = deeper.log_partition / params.gamma;
    trace.levels[static_cast<std::size_t>(k)] = level;
  }
  trace.decision = trace.levels.front().f;
  return trace;
}

ActionDistribution qh_decide(const BratsAgent& agent, const AttendanceHistory& history,
                             const GameConfig& cfg) {
  const ActionDistribution prior = prior_belief(history, cfg, agent.params().prior_window);
  if (agent.beta() < agent.params().epsilon) return prior;
  return qh_trace(agent.beta(), agent.params(), prior, cfg).decision;
}

void BratsRanges::validate() const {
  if (!(beta0_lo <= beta0_hi && gamma_lo <= gamma_hi && eta_lo <= eta_hi))
    throw ConfigError("parameter range has lo > hi");
  if (!(beta0_lo >= 0.0)) throw ConfigError("beta0 range must be non-negative");
  if (!(gamma_lo >= 0.0 && gamma_hi < 1.0)) throw ConfigError("gamma range must lie in [0, 1)");
  if (!(eta_lo > 0.0)) throw ConfigError("eta range must be positive");
  if (prior_window < 1 || max_depth < 1 || !(epsilon > 0.0))
    throw ConfigError("prior_window, max_depth and epsilon must be positive");
  if (!(beta_ceiling >= beta0_hi)) throw ConfigError("beta_ceiling below beta0 range");
}

std::vector<BratsAgent> spawn_population(int n, const BratsRanges& ranges, Rng& rng) {
  ranges.validate();
  if (n < 1) throw ConfigError("population size must be positive");
  std::vector<BratsAgent> agents;
  agents.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    BratsParams p;
    p.beta0 = uniform(rng, ranges.beta0_lo, ranges.beta0_hi);
    p.gamma = uniform(rng, ranges.gamma_lo, ranges.gamma_hi);
    p.eta = uniform(rng, ranges.eta_lo, ranges.eta_hi);
    p.prior_window = ranges.prior_window;
    p.max_depth = ranges.max_depth;
    p.epsilon = ranges.epsilon;
    p.beta_ceiling = ranges.beta_ceiling;
    agents.emplace_back(p);
  }
  return agents;
}

}  // namespace elfarol
