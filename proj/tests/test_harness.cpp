#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "elfarol/errors.hpp"
#include "elfarol/harness.hpp"

using namespace elfarol;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("elfarol_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  return ExperimentConfig::from_json(json{{"model", {"brats", "as", "noise"}},
                                          {"c", {0.4, 0.6}},
                                          {"runs", 2},
                                          {"T", 250},
                                          {"L_max", 4},
                                          {"seed", 123}});
}

}  // namespace

TEST_CASE("configuration defaults and overrides") {
  const ExperimentConfig d = ExperimentConfig::from_json(json::object());
  CHECK(d.runs == 30);
  CHECK(d.game.n_agents == 100);
  CHECK(d.capacities.size() == 9);
  CHECK(d.models == std::vector<ModelKind>{ModelKind::Brats});
  CHECK(d.params.learning == LearningTrigger::OnRegret);

  const ExperimentConfig c = ExperimentConfig::from_json(
      json{{"model", "noise"}, {"c", 0.3}, {"eta", {0.1, 0.2}}, {"gamma", 0.5}, {"beta_ceiling", 4.0},
           {"learning", "every_round"}, {"volatility_basis", "previous_attendance"}, {"noise_q", 0.25}});
  CHECK(c.models == std::vector<ModelKind>{ModelKind::Noise});
  CHECK(c.capacities == std::vector<double>{0.3});
  CHECK(c.params.brats.eta_lo == 0.1);
  CHECK(c.params.brats.eta_hi == 0.2);
  CHECK(c.params.brats.gamma_lo == 0.5);
  CHECK(c.params.brats.gamma_hi == 0.5);
  CHECK(c.params.brats.beta_ceiling == 4.0);
  CHECK(c.params.learning == LearningTrigger::EveryRound);
  CHECK(c.analysis.volatility_basis == VolatilityBasis::PreviousAttendance);
  CHECK(c.params.noise_q == 0.25);
}

TEST_CASE("configuration round-trips through JSON") {
  const ExperimentConfig a = small_config();
  const ExperimentConfig b = ExperimentConfig::from_json(a.to_json());
  CHECK(a.to_json() == b.to_json());
  CHECK(config_hash(a) == config_hash(b));
  ExperimentConfig moved = a;
  moved.out_dir = "elsewhere";
  CHECK(config_hash(moved) == config_hash(a));
  moved.seed += 1;
  CHECK(config_hash(moved) != config_hash(a));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"runs", 0}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"rnus", 3}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"c", {0.5, 1.0}}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"c", {0.5, 0.501}}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"model", "ants"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"runs", "many"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"runs", 2.5}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"gamma", {0.9, 0.1}}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"T", 10}, {"burn_in", 10}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"U_exit", 2.0}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json{{"seed", -1}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::array()), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("summarize") {
  GameConfig g;
  g.n_agents = 100;
  g.burn_in = 1;
  RunTrace a;
  a.capacity = 0.5;
  a.attendance = {0, 40, 60};
  RunTrace b = a;
  b.attendance = {100, 50, 50};
  RunTrace single;
  single.capacity = 0.2;
  single.attendance = {0, 30, 10};

  const auto rows = summarize({a, b, single}, g);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].capacity == 0.2);
  CHECK(rows[0].runs == 1);
  CHECK(rows[0].mean_rate == doctest::Approx(0.2));
  CHECK(rows[0].std_rate == 0.0);
  CHECK(rows[0].mean_error == doctest::Approx(0.1));
  CHECK(rows[0].std_error == 0.0);
  CHECK(rows[1].mean_rate == doctest::Approx(0.5));
  CHECK(rows[1].std_rate == 0.0);
  CHECK(rows[1].mean_error == doctest::Approx(0.05));
  CHECK(rows[1].std_error == doctest::Approx(std::sqrt(2.0) * 0.05));
}

TEST_CASE("noise traders attend at rate c within two standard errors") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      json{{"model", "noise"}, {"c", {0.3, 0.7}}, {"runs", 5}, {"T", 1000}, {"seed", 1}});
  const ExperimentResult r = run_experiment(cfg);
  std::vector<RunTrace> traces;
  for (const auto& cap : r.models[0].capacities) traces.insert(traces.end(), cap.traces.begin(), cap.traces.end());
  for (const auto& row : summarize(traces, cfg.game)) {
    const double rounds = (cfg.game.rounds - cfg.game.burn_in) * row.runs;
    const double se = std::sqrt(row.capacity * (1 - row.capacity) / (cfg.game.n_agents * rounds));
    CHECK(std::abs(row.mean_rate - row.capacity) < 2 * se);
  }
}

TEST_CASE("derive_seed separates streams") {
  std::set<std::uint64_t> seeds;
  for (double c : {0.1, 0.2, 0.3})
    for (int run = 0; run < 30; ++run)
      for (ModelKind k : {ModelKind::Brats, ModelKind::AdaptiveStrategies, ModelKind::Noise})
        seeds.insert(derive_seed(42, c, run, k));
  CHECK(seeds.size() == 3 * 30 * 3);
  CHECK(derive_seed(42, 0.3, 4, ModelKind::Brats) == derive_seed(42, 0.3, 4, ModelKind::Brats));
  CHECK(derive_seed(42, 0.3, 4, ModelKind::Brats) != derive_seed(43, 0.3, 4, ModelKind::Brats));
}

TEST_CASE("simulate_run produces series of length T") {
  GameConfig g;
  g.rounds = 120;
  g.burn_in = 20;
  for (ModelKind k : {ModelKind::Brats, ModelKind::AdaptiveStrategies, ModelKind::Noise}) {
    ModelParams p;
    p.kind = k;
    const RunTrace t = simulate_run(g, p, 5);
    CHECK(t.attendance.size() == 120);
    CHECK(t.diversity.size() == 120);
    CHECK(t.mean_beta.size() == 120);
    for (std::size_t i = 0; i < t.attendance.size(); ++i) {
      CHECK(t.attendance[i] >= 0);
      CHECK(t.attendance[i] <= 100);
      CHECK(t.diversity[i] >= 0.0);
      CHECK(t.diversity[i] <= 1.0);
    }
    if (k == ModelKind::Brats) {
      for (std::size_t i = 1; i < t.mean_beta.size(); ++i) CHECK(t.mean_beta[i] >= t.mean_beta[i - 1]);
    }
  }
}

TEST_CASE("every-round learning raises each beta by eta per round") {
  GameConfig g;
  g.rounds = 10;
  g.burn_in = 0;
  ModelParams p;
  p.learning = LearningTrigger::EveryRound;
  p.brats.beta0_lo = p.brats.beta0_hi = 0.0;
  p.brats.eta_lo = p.brats.eta_hi = 0.125;
  const RunTrace t = simulate_run(g, p, 9);
  for (std::size_t i = 0; i < t.mean_beta.size(); ++i)
    CHECK(t.mean_beta[i] == doctest::Approx(0.125 * static_cast<double>(i + 1)));
}

TEST_CASE("trace CSV round trip") {
  RunTrace t;
  t.attendance = {0, 57, 100};
  t.diversity = {0.0, 0.123456789012345678, 1.0};
  t.mean_beta = {0.05, 1.0 / 3.0, 2.5e-7};
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  write_trace_csv(t, dir / "t.csv");
  const RunTrace back = read_trace_csv(dir / "t.csv");
  CHECK(back.attendance == t.attendance);
  CHECK(back.diversity == t.diversity);
  CHECK(back.mean_beta == t.mean_beta);
  CHECK(slurp(dir / "t.csv").rfind("t,attendance,diversity,mean_beta\n0,0,0,0.05\n", 0) == 0);

  std::ofstream(dir / "bad.csv") << "t,attendance,diversity,mean_beta\n0,1,x,0\n";
  CHECK_THROWS_AS(read_trace_csv(dir / "bad.csv"), DomainError);
  CHECK(trace_file_name(0.1, 7) == "run_0.10_007.csv");
}

TEST_CASE("degenerate one-round sweep reports failures without aborting") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(
      json{{"model", {"brats", "noise"}}, {"c", {0.5}}, {"runs", 1}, {"T", 1}, {"burn_in", 0}});
  const ExperimentResult r = run_experiment(cfg);
  for (const auto& m : r.models) {
    const CapacitySweep& cap = m.capacities.front();
    CHECK(cap.traces.front().attendance.size() == 1);
    CHECK(cap.report.failed_runs == 1);
    CHECK_FALSE(cap.analyses.front().failures.empty());
    CHECK_FALSE(cap.report.sigma_rate.has_value());
    for (const auto& h : cap.report.hill) CHECK_FALSE(h.error.empty());
  }
  const fs::path dir = scratch("degenerate");
  write_experiment(cfg, r, dir);
  write_figure_data(cfg, r, dir);
  CHECK(fs::exists(dir / "brats" / "run_0.50_000.csv"));
}

TEST_CASE("sweep persistence, re-analysis and determinism") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult serial = run_experiment(cfg, 1);
  const ExperimentResult parallel = run_experiment(cfg, 3);

  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  write_experiment(cfg, serial, a);
  write_experiment(cfg, parallel, b);
  write_figure_data(cfg, serial, a);
  write_figure_data(cfg, parallel, b);

  std::size_t csv_files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    CAPTURE(rel.string());
    CHECK(slurp(entry.path()) == slurp(b / rel));
    csv_files += entry.path().extension() == ".csv";
  }
  // 12 traces, 3 models x 3 report CSVs, 9 figure tables.
  CHECK(csv_files == 12 + 9 + 9);

  const json manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["models"]["brats"][0]["runs"].size() == 2);
  CHECK(manifest["models"]["as"][1]["runs"][1]["seed"].get<std::uint64_t>() ==
        derive_seed(123, 0.6, 1, ModelKind::AdaptiveStrategies));

  auto [loaded_cfg, loaded] = load_experiment(a);
  CHECK(loaded_cfg.to_json() == cfg.to_json());
  analyze_result(loaded, loaded_cfg, 2);
  const fs::path c = scratch("sweep_c");
  write_reports(loaded_cfg, loaded, c);
  write_figure_data(loaded_cfg, loaded, c);
  for (const char* f : {"brats/acf.csv", "brats/irf.csv", "as/aic_rank.csv", "brats/granger_report.json",
                        "noise/tail_report.json", "fig1_utilisation.csv", "table3_granger.csv"})
    CHECK(slurp(a / f) == slurp(c / f));

  // Noise traders have constant zero diversity, so their Granger stage fails per run.
  const auto& noise = serial.models[2].capacities[0];
  CHECK(noise.report.failed_runs == 2);
  CHECK(noise.analyses[0].failures.contains("granger"));
  CHECK(noise.analyses[0].sigma_rate.has_value());
}

TEST_CASE("figure tables carry their documented headers") {
  const ExperimentConfig cfg = small_config();
  const fs::path dir = scratch("figures");
  write_figure_data(cfg, run_experiment(cfg, 2), dir);
  const std::map<std::string, std::string> headers = {
      {"fig1_utilisation.csv", "model,c,mean_rate,std_rate,mean_error,std_error"},
      {"fig2_timeseries.csv", "model,c,t,mean_rate,std_rate"},
      {"fig3_violin.csv", "model,c,tail,alpha"},
      {"fig4_acf.csv", "model,c,lag,r,band"},
      {"fig6_irf.csv", "model,c,horizon,median,q25,q75"},
      {"fig7_aic_rank.csv", "model,c,lag,median_rank,q25,q75"},
      {"table1_sigma.csv", "model,c,sigma_rate_pct,std_pct,runs"},
      {"table2_hill.csv", "model,tail,mean_alpha,std_alpha,capacities"},
      {"table3_granger.csv", "model,c,runs_tested,hmp,hmp_adjusted,significant"},
  };
  for (const auto& [file, header] : headers) {
    const std::string text = slurp(dir / file);
    CAPTURE(file);
    CHECK(text.substr(0, text.find('\n')) == header);
    CHECK(std::count(text.begin(), text.end(), '\n') > 1);
  }
}

TEST_CASE("ensure_writable") {
  CHECK_THROWS_AS(ensure_writable("/proc/not_a_dir"), ConfigError);
  const fs::path ok = scratch("writable");
  CHECK_NOTHROW(ensure_writable(ok));
  CHECK(fs::is_directory(ok));
}
