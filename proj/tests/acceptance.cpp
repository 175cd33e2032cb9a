// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elfarol/brats.hpp"
#include "elfarol/econometrics.hpp"
#include "elfarol/harness.hpp"
#include "elfarol/tail_stats.hpp"
#include "oracles.hpp"

namespace {

using namespace elfarol;
namespace fs = std::filesystem;
using Matrix = MatrixX<double>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o) {
  std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

GameConfig small_game(double c, int n) {
  GameConfig cfg;
  cfg.capacity = c;
  cfg.n_agents = n;
  return cfg;
}

AttendanceHistory random_history(int n, Rng& rng, int max_len) {
  AttendanceHistory h(n);
  const int len = static_cast<int>(uniform01(rng) * max_len);
  for (int i = 0; i < len; ++i) h.append(static_cast<int>(uniform01(rng) * (n + 1)));
  return h;
}

BratsAgent agent_with(double beta, double gamma, int window, int max_depth, double epsilon) {
  BratsParams p;
  p.beta0 = beta;
  p.gamma = gamma;
  p.prior_window = window;
  p.max_depth = max_depth;
  p.epsilon = epsilon;
  return BratsAgent(p);
}

Outcome softmax_reduction() {
  Rng rng(11);
  int mismatches = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    GameConfig cfg = small_game(0.05 + 0.9 * uniform01(rng), 2 + static_cast<int>(uniform01(rng) * 150));
    cfg.u_exit = uniform(rng, -1.0, 1.0);
    cfg.u_enter = cfg.u_exit + uniform(rng, 0.01, 2.0);
    cfg.u_overcrowded = cfg.u_exit - uniform(rng, 0.01, 2.0);
    const double beta = uniform(rng, 2e-3, 20.0);
    const AttendanceHistory hist = random_history(cfg.n_agents, rng, 15);
    const double prior = prior_belief(hist, cfg, 10).enter;
    const double expected = oracle::softmax_enter(beta, prior, prior, cfg);
    const ActionDistribution f = qh_decide(agent_with(beta, 0.0, 10, kDefaultMaxDepth, kPrecisionThreshold), hist, cfg);
    const double err = std::max(std::abs(f.enter - expected), std::abs(f.exit - (1.0 - expected)));
    worst = std::max(worst, err);
    if (err > 1e-12) ++mismatches;
  }
  return {mismatches == 0, format("%d/1000 outside 1e-12, max error %.2e", mismatches, worst)};
}

Outcome recursion_oracle() {
  Rng rng(5);
  int mismatches = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const GameConfig cfg = small_game(0.05 + 0.9 * uniform01(rng), 10);
    const double beta = uniform(rng, 0.01, 15.0);
    const double gamma = uniform(rng, 0.0, 0.95);
    const int max_depth = 1 + static_cast<int>(uniform01(rng) * 3);
    const double epsilon = uniform(rng, 1e-3, 1.0);
    const BratsAgent agent = agent_with(beta, gamma, 5, max_depth, epsilon);
    const AttendanceHistory hist = random_history(10, rng, 8);
    const double prior = prior_belief(hist, cfg, 5).enter;
    const double err =
        std::abs(qh_decide(agent, hist, cfg).enter - oracle::recursive_response(beta, agent.params(), prior, cfg));
    worst = std::max(worst, err);
    if (err > 1e-10) ++mismatches;
  }
  return {mismatches == 0, format("%d/200 outside 1e-10, max error %.2e", mismatches, worst)};
}

Outcome hill_oracle() {
  Rng rng(2024);
  bool pass = true;
  std::string detail;
  for (double alpha : {1.0, 2.0, 4.0}) {
    const double est = hill_estimator(oracle::pareto_sample(alpha, 100000, rng), 0.05);
    pass = pass && std::abs(est - alpha) < 0.1 * alpha;
    detail += format("alpha %.0f -> %.3f  ", alpha, est);
  }
  return {pass, detail};
}

Outcome econometric_size_power() {
  Rng rng(500);
  std::normal_distribution<double> normal;
  const int max_lag = AnalysisConfig{}.max_var_lag;
  auto selected_test = [&](const std::vector<double>& x, const std::vector<double>& y) {
    const auto series = make_bivariate<double>(x, y);
    return granger_test(series, select_lag(series, max_lag).lag).reject_at_95;
  };

  int false_rejections = 0;
  for (int trial = 0; trial < 400; ++trial)
    false_rejections += selected_test(oracle::white_noise(500, rng), oracle::white_noise(500, rng));
  int power = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x = oracle::white_noise(500, rng);
    std::vector<double> y(500);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = (t > 0 ? 0.4 * x[t - 1] : 0.0) + normal(rng);
    power += selected_test(x, y);
  }

  int adf_rw = 0, adf_wn = 0, kpss_rw = 0, kpss_wn = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto rw = oracle::random_walk(500, rng);
    const auto wn = oracle::white_noise(500, rng);
    adf_rw += !adf_test(rw, schwert_max_lag(rw.size())).reject_at_95;
    adf_wn += adf_test(wn, schwert_max_lag(wn.size())).reject_at_95;
    kpss_rw += kpss_test(rw).reject_at_95;
    kpss_wn += !kpss_test(wn).reject_at_95;
  }

  const double fpr = false_rejections / 400.0;
  const bool pass = std::abs(fpr - 0.05) <= 0.03 && power >= 190 && adf_rw >= 180 && adf_wn >= 180 &&
                    kpss_rw >= 180 && kpss_wn >= 180;
  return {pass, format("Granger size %.2f%%, power %d/200; ADF correct %d+%d/400; KPSS correct %d+%d/400",
                       100.0 * fpr, power, adf_rw, adf_wn, kpss_rw, kpss_wn)};
}

Outcome irf_oracle() {
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(2, 2);
    for (Eigen::Index i = 0; i < 4; ++i) a(i) = uniform(rng, -0.6, 0.6);
    VarModel<double> model;
    model.lag = 1;
    model.coefficients = {a};
    model.intercept = Eigen::VectorXd::Zero(2);
    model.sigma = Matrix::Identity(2, 2);
    model.sigma_ml = model.sigma;
    const ImpulseResponse<double> irf = impulse_response(model, 20);
    Matrix power = Matrix::Identity(2, 2);
    for (int h = 0; h <= 20; ++h) {
      worst = std::max(worst, (irf.theta[static_cast<std::size_t>(h)] - power).cwiseAbs().maxCoeff());
      power = a * power;
    }
  }
  return {worst <= 1e-10, format("50 random VAR(1) models, horizons 0..20, max error %.2e", worst)};
}

const ModelSweep& sweep_of(const ExperimentResult& result, ModelKind kind) {
  for (const auto& m : result.models)
    if (m.kind == kind) return m;
  throw std::logic_error("model missing from sweep");
}

bool in_range(double c, double lo, double hi) { return c > lo - 1e-9 && c < hi + 1e-9; }

Outcome convergence(const ExperimentResult& result) {
  double brats_dev = 0.0, as_dev = 0.0;
  for (const auto& cap : sweep_of(result, ModelKind::Brats).capacities)
    if (in_range(cap.capacity, 0.3, 0.7)) brats_dev = std::max(brats_dev, std::abs(cap.report.mean_rate - cap.capacity));
  for (const auto& cap : sweep_of(result, ModelKind::AdaptiveStrategies).capacities)
    if (in_range(cap.capacity, 0.4, 0.6)) as_dev = std::max(as_dev, std::abs(cap.report.mean_rate - cap.capacity));
  return {brats_dev <= 0.05 && as_dev <= 0.05,
          format("BRATS max |rate - c| over c 0.3..0.7 = %.3f; AS over c 0.4..0.6 = %.3f (limit 0.05)", brats_dev,
                 as_dev)};
}

double mean_sigma_rate(const ModelSweep& m) {
  double sum = 0.0;
  for (const auto& cap : m.capacities) sum += cap.report.sigma_rate.value_or(0.0);
  return sum / static_cast<double>(m.capacities.size());
}

Outcome table1(const ExperimentResult& result) {
  const ModelSweep& brats = sweep_of(result, ModelKind::Brats);
  const double noise_avg = mean_sigma_rate(sweep_of(result, ModelKind::Noise));
  const double brats_avg = mean_sigma_rate(brats);
  double brats_min = std::numeric_limits<double>::infinity();
  for (const auto& cap : brats.capacities) brats_min = std::min(brats_min, cap.report.sigma_rate.value_or(0.0));
  const bool pass = noise_avg >= 0.15 && noise_avg <= 0.45 && brats_min >= 0.6 && brats_avg >= 2.0 * noise_avg;
  return {pass, format("noise mean %.3f%% (0.15..0.45); BRATS min %.3f%% (>= 0.6), mean %.3f%% (>= 2x noise)",
                       noise_avg, brats_min, brats_avg)};
}

// Mean over capacities of the pooled Hill estimate at each tail fraction.
std::vector<double> mean_hill(const ModelSweep& m, std::size_t tails) {
  std::vector<double> sum(tails, 0.0);
  std::vector<int> count(tails, 0);
  for (const auto& cap : m.capacities)
    for (std::size_t i = 0; i < tails; ++i)
      if (cap.report.hill[i].alpha) {
        sum[i] += *cap.report.hill[i].alpha;
        ++count[i];
      }
  for (std::size_t i = 0; i < tails; ++i) sum[i] = count[i] ? sum[i] / count[i] : std::nan("");
  return sum;
}

Outcome tail_ordering(const ExperimentResult& result, const AnalysisConfig& acfg) {
  const std::size_t tails = acfg.tail_fractions.size();
  const auto b = mean_hill(sweep_of(result, ModelKind::Brats), tails);
  const auto a = mean_hill(sweep_of(result, ModelKind::AdaptiveStrategies), tails);
  const auto n = mean_hill(sweep_of(result, ModelKind::Noise), tails);
  bool ordered = true;
  std::string detail;
  double brats_mean = 0.0;
  double noise_smallest = std::nan("");
  for (std::size_t i = 0; i < tails; ++i) {
    ordered = ordered && b[i] < a[i] && a[i] < n[i];
    brats_mean += b[i] / static_cast<double>(tails);
    detail += format("%.1f%%: %.2f < %.2f < %.2f; ", 100.0 * acfg.tail_fractions[i], b[i], a[i], n[i]);
    if (std::abs(acfg.tail_fractions[i] - 0.025) < 1e-12) noise_smallest = n[i];
  }
  const bool noise_ok = noise_smallest >= 5.5 && noise_smallest <= 8.5;
  const bool brats_ok = brats_mean >= 1.0 && brats_mean <= 3.5;
  detail += format("noise 2.5%% = %.2f (5.5..8.5); BRATS mean = %.2f (1..3.5)", noise_smallest, brats_mean);
  return {ordered && noise_ok && brats_ok, detail};
}

bool exceeds_band(const Autocorrelation& acf, int from_lag) {
  for (std::size_t k = static_cast<std::size_t>(from_lag); k < acf.r.size(); ++k)
    if (std::abs(acf.r[k]) > acf.band) return true;
  return false;
}

Outcome clustering(const ExperimentResult& result) {
  bool pass = true;
  std::string detail;
  for (double c : {0.4, 0.5, 0.6}) {
    int brats_hits = 0, brats_runs = 0, noise_quiet = 0, noise_runs = 0;
    for (const auto& cap : sweep_of(result, ModelKind::Brats).capacities)
      if (std::abs(cap.capacity - c) < 1e-9)
        for (const auto& r : cap.analyses) {
          ++brats_runs;
          brats_hits += r.acf && exceeds_band(*r.acf, 2);
        }
    for (const auto& cap : sweep_of(result, ModelKind::Noise).capacities)
      if (std::abs(cap.capacity - c) < 1e-9)
        for (const auto& r : cap.analyses) {
          ++noise_runs;
          noise_quiet += r.acf && !exceeds_band(*r.acf, 1);
        }
    pass = pass && 2 * brats_hits > brats_runs && noise_quiet >= 0.9 * noise_runs && brats_runs > 0 && noise_runs > 0;
    detail += format("c=%.1f BRATS %d/%d beyond band at lag>=2, noise %d/%d inside at lag>=1; ", c, brats_hits,
                     brats_runs, noise_quiet, noise_runs);
  }
  return {pass, detail};
}

Outcome table3(const ExperimentResult& result) {
  int significant = 0, tested = 0;
  for (const auto& cap : sweep_of(result, ModelKind::Brats).capacities) {
    ++tested;
    significant += cap.report.granger_significant;
  }
  return {significant >= 7, format("BRATS HMP significant after Bonferroni at %d/%d capacities (>= 7)", significant,
                                   tested)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents for every regular file under root.
std::vector<std::pair<std::string, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).generic_string(), slurp(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism(const ExperimentConfig& cfg, const ExperimentResult& first, const fs::path& scratch) {
  const ExperimentResult second = run_experiment(cfg, 1);
  const fs::path a = scratch / "first", b = scratch / "second";
  write_experiment(cfg, first, a);
  write_figure_data(cfg, first, a / "figures");
  write_experiment(cfg, second, b);
  write_figure_data(cfg, second, b / "figures");
  const auto ta = tree(a), tb = tree(b);
  std::size_t csvs = 0, differing = 0;
  for (const auto& [name, body] : ta) csvs += name.ends_with(".csv");
  if (ta.size() != tb.size()) return {false, format("file counts differ: %zu vs %zu", ta.size(), tb.size())};
  for (std::size_t i = 0; i < ta.size(); ++i) differing += ta[i] != tb[i];
  return {differing == 0, format("%zu files (%zu CSVs) compared, %zu differ; second sweep on one thread",
                                 ta.size(), csvs, differing)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  report("Softmax reduction", softmax_reduction());
  report("Recursion oracle", recursion_oracle());
  report("Hill oracle", hill_oracle());
  report("Econometric size/power", econometric_size_power());
  report("IRF oracle", irf_oracle());

  ExperimentConfig cfg = default_config();
  cfg.models = {ModelKind::Brats, ModelKind::AdaptiveStrategies, ModelKind::Noise};
  const fs::path scratch = fs::temp_directory_path() / format("elfarol_acceptance_%llu",
      static_cast<unsigned long long>(std::chrono::steady_clock::now().time_since_epoch().count()));
  cfg.out_dir = scratch;
  const ExperimentResult result = run_experiment(cfg, 0);

  report("Convergence", convergence(result));
  report("Table 1 analogue", table1(result));
  report("Tail-index ordering", tail_ordering(result, cfg.analysis));
  report("Clustered volatility", clustering(result));
  report("Table 3 analogue", table3(result));
  report("Determinism", determinism(cfg, result, scratch));
  fs::remove_all(scratch);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criteria failed (%.0f s)\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
