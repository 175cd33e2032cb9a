// Command-line front end: simulate, analyze, report.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "elfarol/errors.hpp"
#include "elfarol/harness.hpp"

namespace {

using namespace elfarol;
namespace fs = std::filesystem;

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

void print_summary(const ExperimentResult& result) {
  for (const auto& model : result.models) {
    int significant = 0, failed = 0;
    for (const auto& cap : model.capacities) {
      significant += cap.report.granger_significant;
      failed += cap.report.failed_runs;
    }
    std::printf("%-6s", std::string(to_string(model.kind)).c_str());
    for (const auto& cap : model.capacities)
      std::printf("  c=%.2f:%.3f", cap.capacity, cap.report.mean_rate);
    std::printf("\n       granger significant at %d/%zu capacities, %d runs with failed stages\n",
                significant, model.capacities.size(), failed);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"El Farol bar simulator with BRATS, adaptive-strategy and noise-trader populations"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir;
  std::string traces_dir;

  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo sweep and persist traces and reports");
  simulate->add_option("--config", config_path, "JSON experiment configuration")->required();
  simulate->add_option("--seed", seed, "master seed, overrides the configuration");
  simulate->add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out_dir, "output directory, overrides the configuration");

  auto* analyze = app.add_subcommand("analyze", "re-run statistics on persisted traces");
  analyze->add_option("--traces", traces_dir, "sweep directory containing manifest.json")->required();
  analyze->add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* report = app.add_subcommand("report", "write plot-data CSVs for every figure and table");
  report->add_option("--out", out_dir, "directory for the CSVs")->required();
  report->add_option("--traces", traces_dir, "sweep directory (defaults to --out)");
  report->add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  ExperimentConfig cfg;
  ExperimentResult result;
  try {
    if (simulate->parsed()) {
      cfg = load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      ensure_writable(cfg.out_dir);
    } else {
      if (report->parsed() && traces_dir.empty()) traces_dir = out_dir;
      if (!fs::is_directory(traces_dir)) throw ConfigError("no sweep directory at " + traces_dir);
      std::tie(cfg, result) = load_experiment(traces_dir);
      if (report->parsed()) ensure_writable(out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }

  try {
    if (simulate->parsed()) {
      result = run_experiment(cfg, jobs);
      write_experiment(cfg, result, cfg.out_dir);
      print_summary(result);
      std::cout << "wrote " << cfg.out_dir.string() << '\n';
    } else if (analyze->parsed()) {
      analyze_result(result, cfg, jobs);
      write_reports(cfg, result, traces_dir);
      print_summary(result);
    } else {
      analyze_result(result, cfg, jobs);
      write_figure_data(cfg, result, out_dir);
      std::cout << "wrote figure data to " << out_dir << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
