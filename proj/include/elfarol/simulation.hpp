#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "elfarol/baseline.hpp"
#include "elfarol/brats.hpp"
#include "elfarol/game.hpp"

namespace elfarol {

enum class ModelKind { Brats, AdaptiveStrategies, Noise };

std::string_view to_string(ModelKind kind);
/// Accepts "brats", "as", "noise". Throws ConfigError otherwise.
ModelKind parse_model(std::string_view name);

/// When BRATS agents apply their learning step.
enum class LearningTrigger {
  EveryRound,  ///< after every round
  OnRegret,    ///< only after a round in which the other action would have paid more
};

/// Everything needed to simulate one population at one capacity.
struct ModelParams {
  ModelKind kind = ModelKind::Brats;
  BratsRanges brats;
  LearningTrigger learning = LearningTrigger::OnRegret;
  AsRanges as;
  /// Entry probability for noise traders; negative means "use the capacity c".
  double noise_q = -1.0;
};

/// One seeded run. All series have one entry per round.
struct RunTrace {
  int run_id = 0;
  std::uint64_t seed = 0;
  double capacity = 0.0;
  std::vector<int> attendance;
  std::vector<double> diversity;
  std::vector<double> mean_beta;  ///< zero for populations without beta
};

/**
 * Spawns the population from `seed`, then plays cfg.rounds synchronous rounds. After each
 * round BRATS agents learn, and the population diversity and mean beta are recorded.
 * Noise traders have no belief state; their diversity column is 0.
 */
RunTrace simulate_run(const GameConfig& cfg, const ModelParams& model, std::uint64_t seed,
                      int run_id = 0);

/// Child seed for (master, c, run); distinct pairs give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, double capacity, int run_index, ModelKind kind);

}  // namespace elfarol
