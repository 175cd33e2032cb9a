#include "elfarol/simulation.hpp"

#include <cmath>
#include <numeric>
#include <span>

#include "elfarol/diversity.hpp"

namespace elfarol {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Brats: return "brats";
    case ModelKind::AdaptiveStrategies: return "as";
    case ModelKind::Noise: return "noise";
  }
  return "unknown";
}

ModelKind parse_model(std::string_view name) {
  if (name == "brats") return ModelKind::Brats;
  if (name == "as") return ModelKind::AdaptiveStrategies;
  if (name == "noise") return ModelKind::Noise;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected brats, as or noise)");
}

std::uint64_t derive_seed(std::uint64_t master, double capacity, int run_index, ModelKind kind) {
  // Capacity enters at 1e-6 resolution so that 0.1 and 0.1000000001 share a stream.
  const auto c_key = static_cast<std::uint64_t>(std::llround(capacity * 1e6));
  std::uint64_t h = mix64(master);
  h = mix64(h ^ c_key);
  h = mix64(h ^ static_cast<std::uint64_t>(run_index));
  return mix64(h ^ static_cast<std::uint64_t>(kind));
}

namespace {

template <typename Agent, typename Record>
RunTrace play(std::vector<Agent>& agents, const GameConfig& cfg, Rng& rng, Record record) {
  RoundOutcome last;
  RunTrace trace;
  trace.attendance.reserve(static_cast<std::size_t>(cfg.rounds));
  trace.diversity.reserve(static_cast<std::size_t>(cfg.rounds));
  trace.mean_beta.reserve(static_cast<std::size_t>(cfg.rounds));
  AttendanceHistory history(cfg.n_agents);
  for (int t = 0; t < cfg.rounds; ++t) {
    last = play_round(std::span<Agent>(agents), history, cfg, rng);
    trace.attendance.push_back(last.attendance);
    record(trace, last);
  }
  return trace;
}

// The agent would have been better off with the other action.
bool regretted(const RoundOutcome& out, std::size_t agent, const GameConfig& cfg) {
  const double got = out.payoffs[agent];
  if (got == cfg.u_exit) return cfg.under_capacity(out.attendance);
  return got == cfg.u_overcrowded;
}

}  // namespace

RunTrace simulate_run(const GameConfig& cfg, const ModelParams& model, std::uint64_t seed,
                      int run_id) {
  cfg.validate();
  Rng rng(seed);
  RunTrace trace;
  switch (model.kind) {
    case ModelKind::Brats: {
      auto agents = spawn_population(cfg.n_agents, model.brats, rng);
      trace = play(agents, cfg, rng, [&](RunTrace& tr, const RoundOutcome& out) {
        double sum = 0.0;
        for (std::size_t i = 0; i < agents.size(); ++i) {
          if (model.learning == LearningTrigger::EveryRound || regretted(out, i, cfg))
            agents[i].learn();
          sum += agents[i].beta();
        }
        tr.diversity.push_back(population_diversity(std::span<const BratsAgent>(agents),
                                                    DiversityKind::BetaResources));
        tr.mean_beta.push_back(sum / static_cast<double>(agents.size()));
      });
      break;
    }
    case ModelKind::AdaptiveStrategies: {
      auto agents = spawn_as_population(cfg.n_agents, model.as, rng);
      trace = play(agents, cfg, rng, [&](RunTrace& tr, const RoundOutcome&) {
        tr.diversity.push_back(population_diversity(std::span<const AsAgent>(agents),
                                                    DiversityKind::StrategyCodes));
        tr.mean_beta.push_back(0.0);
      });
      break;
    }
    case ModelKind::Noise: {
      const double q = model.noise_q < 0.0 ? cfg.capacity : model.noise_q;
      auto agents = spawn_noise_population(cfg.n_agents, q);
      trace = play(agents, cfg, rng, [](RunTrace& tr, const RoundOutcome&) {
        tr.diversity.push_back(0.0);
        tr.mean_beta.push_back(0.0);
      });
      break;
    }
  }
  trace.run_id = run_id;
  trace.seed = seed;
  trace.capacity = cfg.capacity;
  return trace;
}

}  // namespace elfarol
