#include "elfarol/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "elfarol/errors.hpp"

namespace elfarol {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest round-trip decimal form.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string learning_name(LearningTrigger t) {
  return t == LearningTrigger::OnRegret ? "regret" : "every_round";
}

LearningTrigger parse_learning(const std::string& s) {
  if (s == "regret") return LearningTrigger::OnRegret;
  if (s == "every_round") return LearningTrigger::EveryRound;
  throw ConfigError("learning must be 'regret' or 'every_round', got '" + s + "'");
}

std::string basis_name(VolatilityBasis b) {
  return b == VolatilityBasis::PreviousAttendance ? "previous_attendance" : "capacity";
}

VolatilityBasis parse_basis(const std::string& s) {
  if (s == "capacity") return VolatilityBasis::Capacity;
  if (s == "previous_attendance") return VolatilityBasis::PreviousAttendance;
  throw ConfigError("volatility_basis must be 'capacity' or 'previous_attendance', got '" + s + "'");
}

// A [lo, hi] pair, or a single number for a degenerate range.
std::pair<double, double> parse_range(const json& v, const char* key) {
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(std::string(key) + " must be a number or a [lo, hi] pair");
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("malformed value for '") + key + "'");
  }
}

int get_int(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return get_as<int>(j, key);
}

std::string capacity_label(double c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", c);
  return buf;
}

// Runs task(i) for i in [0, count) on up to `jobs` threads.
template <typename Task>
void parallel_for(std::size_t count, int jobs, Task task) {
  const auto hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(jobs > 0 ? jobs : static_cast<int>(hw)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& t : pool) t.join();
}

RunAnalysis isolated_analysis(const RunTrace& trace, const GameConfig& game,
                              const AnalysisConfig& acfg) {
  try {
    return analyze_run(trace, game, acfg);
  } catch (const std::exception& e) {
    RunAnalysis failed;
    failed.run_id = trace.run_id;
    failed.failures["analysis"] = e.what();
    return failed;
  }
}

void aggregate(ExperimentResult& result, const ExperimentConfig& cfg) {
  for (auto& model : result.models)
    for (auto& cap : model.capacities)
      cap.report = aggregate_capacity(cap.capacity, cap.analyses, cfg.analysis,
                                      model.capacities.size());
}

// Rows of (c, run) in a sweep, in output order.
struct Slot {
  std::size_t model;
  std::size_t capacity;
  std::size_t run;
};

std::vector<Slot> slots_of(const ExperimentResult& result) {
  std::vector<Slot> slots;
  for (std::size_t m = 0; m < result.models.size(); ++m)
    for (std::size_t c = 0; c < result.models[m].capacities.size(); ++c)
      for (std::size_t r = 0; r < result.models[m].capacities[c].traces.size(); ++r)
        slots.push_back({m, c, r});
  return slots;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

json failure_list(const CapacitySweep& cap) {
  json out = json::array();
  for (const auto& a : cap.analyses)
    for (const auto& [stage, message] : a.failures)
      out.push_back({{"run", a.run_id}, {"stage", stage}, {"message", message}});
  return out;
}

json summary_json(const ExperimentConfig& cfg, const ModelSweep& model) {
  std::vector<RunTrace> all;
  for (const auto& cap : model.capacities) all.insert(all.end(), cap.traces.begin(), cap.traces.end());
  json rows = json::array();
  for (const auto& row : summarize(all, cfg.game))
    rows.push_back({{"c", row.capacity},
                    {"runs", row.runs},
                    {"mean_rate", row.mean_rate},
                    {"std_rate", row.std_rate},
                    {"mean_error", row.mean_error},
                    {"std_error", row.std_error}});
  return {{"model", to_string(model.kind)}, {"convergence", rows}};
}

json tail_json(const ModelSweep& model) {
  json caps = json::array();
  for (const auto& cap : model.capacities) {
    const CapacityReport& rep = cap.report;
    json per_run = json::array();
    for (const auto& a : cap.analyses) per_run.push_back(optional_number(a.sigma_rate));
    json hill = json::array();
    for (const auto& h : rep.hill) {
      json entry = {{"tail", h.tail_fraction}, {"alpha", optional_number(h.alpha)}};
      if (!h.error.empty()) entry["error"] = h.error;
      hill.push_back(entry);
    }
    caps.push_back({{"c", cap.capacity},
                    {"runs", rep.runs},
                    {"failed_runs", rep.failed_runs},
                    {"sigma_rate", optional_number(rep.sigma_rate)},
                    {"sigma_rate_per_run", per_run},
                    {"hill", hill},
                    {"failures", failure_list(cap)}});
  }
  return {{"model", to_string(model.kind)}, {"capacities", caps}};
}

json granger_json(const ModelSweep& model) {
  json caps = json::array();
  int significant = 0;
  for (const auto& cap : model.capacities) {
    const CapacityReport& rep = cap.report;
    int adf_x = 0, adf_y = 0, kpss_x = 0, kpss_y = 0, unstable = 0, tested = 0;
    for (const auto& a : cap.analyses) {
      if (!a.granger) continue;
      ++tested;
      adf_x += a.granger->adf_x_stationary;
      adf_y += a.granger->adf_y_stationary;
      kpss_x += a.granger->kpss_x_stationary;
      kpss_y += a.granger->kpss_y_stationary;
      unstable += !a.granger->irf_stable;
    }
    significant += rep.granger_significant;
    caps.push_back({{"c", cap.capacity},
                    {"runs_tested", tested},
                    {"p_values", rep.granger_p},
                    {"lags", rep.granger_lags},
                    {"hmp", optional_number(rep.hmp)},
                    {"hmp_adjusted", optional_number(rep.hmp_adjusted)},
                    {"significant", rep.granger_significant},
                    {"adf_stationary", {{"diversity", adf_x}, {"volatility", adf_y}}},
                    {"kpss_stationary", {{"diversity", kpss_x}, {"volatility", kpss_y}}},
                    {"irf_unstable", unstable},
                    {"failures", failure_list(cap)}});
  }
  return {{"model", to_string(model.kind)},
          {"direction", "diversity_change -> volatility_change"},
          {"significant_capacities", significant},
          {"capacities", caps}};
}

std::string acf_csv(const ModelSweep& model) {
  std::string out = "c,lag,r,band\n";
  for (const auto& cap : model.capacities)
    for (std::size_t k = 0; k < cap.report.mean_acf.size(); ++k)
      out += num(cap.capacity) + ',' + std::to_string(k) + ',' + num(cap.report.mean_acf[k]) + ',' +
             num(cap.report.acf_band) + '\n';
  return out;
}

std::string irf_csv(const ModelSweep& model) {
  std::string out = "c,run,horizon,response\n";
  for (const auto& cap : model.capacities)
    for (const auto& a : cap.analyses) {
      if (!a.granger) continue;
      for (std::size_t h = 0; h < a.granger->irf.size(); ++h)
        out += num(cap.capacity) + ',' + std::to_string(a.run_id) + ',' + std::to_string(h) + ',' +
               num(a.granger->irf[h]) + '\n';
    }
  return out;
}

std::string aic_csv(const ModelSweep& model) {
  std::string out = "c,run,lag,aic,rank\n";
  for (const auto& cap : model.capacities)
    for (const auto& a : cap.analyses) {
      if (!a.granger) continue;
      const std::vector<int> ranks = aic_ranks(a.granger->aic);
      for (std::size_t l = 0; l < ranks.size(); ++l)
        out += num(cap.capacity) + ',' + std::to_string(a.run_id) + ',' + std::to_string(l + 1) +
               ',' + num(a.granger->aic[l]) + ',' + std::to_string(ranks[l]) + '\n';
    }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (models.empty()) throw ConfigError("at least one model is required");
  if (capacities.empty()) throw ConfigError("at least one capacity c is required");
  std::set<std::string> labels;
  for (double c : capacities) {
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("capacities must lie in (0, 1)");
    if (!labels.insert(capacity_label(c)).second)
      throw ConfigError("capacities must differ at two decimals, duplicate " + capacity_label(c));
  }
  if (runs < 1) throw ConfigError("runs must be at least 1");
  for (double c : capacities) game_at(c).validate();
  params.brats.validate();
  params.as.validate();
  if (params.noise_q > 1.0) throw ConfigError("noise_q must lie in [0, 1]");
  analysis.validate();
}

GameConfig ExperimentConfig::game_at(double capacity) const {
  GameConfig g = game;
  g.capacity = capacity;
  return g;
}

ModelParams ExperimentConfig::params_for(ModelKind kind) const {
  ModelParams p = params;
  p.kind = kind;
  return p;
}

json ExperimentConfig::to_json() const {
  json model_names = json::array();
  for (ModelKind m : models) model_names.push_back(to_string(m));
  const BratsRanges& b = params.brats;
  return {
      {"model", model_names},
      {"c", capacities},
      {"runs", runs},
      {"N", game.n_agents},
      {"T", game.rounds},
      {"burn_in", game.burn_in},
      {"U_enter", game.u_enter},
      {"U_exit", game.u_exit},
      {"U_overcrowded", game.u_overcrowded},
      {"beta0", {b.beta0_lo, b.beta0_hi}},
      {"gamma", {b.gamma_lo, b.gamma_hi}},
      {"eta", {b.eta_lo, b.eta_hi}},
      {"epsilon", b.epsilon},
      {"max_depth", b.max_depth},
      {"prior_window", b.prior_window},
      {"beta_ceiling", std::isfinite(b.beta_ceiling) ? json(b.beta_ceiling) : json(nullptr)},
      {"learning", learning_name(params.learning)},
      {"M", params.as.memory},
      {"strategies", params.as.strategies},
      {"noise_q", params.noise_q >= 0.0 ? json(params.noise_q) : json(nullptr)},
      {"tail_sizes", analysis.tail_fractions},
      {"acf_max_lag", analysis.acf_max_lag},
      {"L_max", analysis.max_var_lag},
      {"irf_horizon", analysis.irf_horizon},
      {"alpha", analysis.alpha},
      {"volatility_basis", basis_name(analysis.volatility_basis)},
      {"seed", seed},
      {"out", out_dir.string()},
  };
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  static const std::set<std::string> known = {
      "model", "c", "runs", "N", "T", "burn_in", "U_enter", "U_exit", "U_overcrowded",
      "beta0", "gamma", "eta", "epsilon", "max_depth", "prior_window", "beta_ceiling",
      "learning", "M", "strategies", "noise_q", "tail_sizes", "acf_max_lag", "L_max",
      "irf_horizon", "alpha", "volatility_basis", "seed", "out"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");

  ExperimentConfig cfg = default_config();
  if (j.contains("model")) {
    const json& m = j["model"];
    cfg.models.clear();
    if (m.is_string()) {
      cfg.models.push_back(parse_model(m.get<std::string>()));
    } else if (m.is_array()) {
      for (const auto& name : m) {
        if (!name.is_string()) throw ConfigError("model entries must be strings");
        cfg.models.push_back(parse_model(name.get<std::string>()));
      }
    } else {
      throw ConfigError("model must be a string or a list of strings");
    }
  }
  if (j.contains("c")) {
    const json& c = j["c"];
    if (c.is_number()) cfg.capacities = {c.get<double>()};
    else cfg.capacities = get_as<std::vector<double>>(j, "c");
  }
  if (j.contains("runs")) cfg.runs = get_int(j, "runs");
  if (j.contains("N")) cfg.game.n_agents = get_int(j, "N");
  if (j.contains("T")) cfg.game.rounds = get_int(j, "T");
  if (j.contains("burn_in")) cfg.game.burn_in = get_int(j, "burn_in");
  if (j.contains("U_enter")) cfg.game.u_enter = get_as<double>(j, "U_enter");
  if (j.contains("U_exit")) cfg.game.u_exit = get_as<double>(j, "U_exit");
  if (j.contains("U_overcrowded")) cfg.game.u_overcrowded = get_as<double>(j, "U_overcrowded");

  BratsRanges& b = cfg.params.brats;
  if (j.contains("beta0")) std::tie(b.beta0_lo, b.beta0_hi) = parse_range(j["beta0"], "beta0");
  if (j.contains("gamma")) std::tie(b.gamma_lo, b.gamma_hi) = parse_range(j["gamma"], "gamma");
  if (j.contains("eta")) std::tie(b.eta_lo, b.eta_hi) = parse_range(j["eta"], "eta");
  if (j.contains("epsilon")) b.epsilon = get_as<double>(j, "epsilon");
  if (j.contains("max_depth")) b.max_depth = get_int(j, "max_depth");
  if (j.contains("prior_window")) b.prior_window = get_int(j, "prior_window");
  if (j.contains("beta_ceiling"))
    b.beta_ceiling = j["beta_ceiling"].is_null() ? std::numeric_limits<double>::infinity()
                                                 : get_as<double>(j, "beta_ceiling");
  if (j.contains("learning")) cfg.params.learning = parse_learning(get_as<std::string>(j, "learning"));
  if (j.contains("M")) cfg.params.as.memory = get_int(j, "M");
  if (j.contains("strategies")) cfg.params.as.strategies = get_int(j, "strategies");
  if (j.contains("noise_q"))
    cfg.params.noise_q = j["noise_q"].is_null() ? -1.0 : get_as<double>(j, "noise_q");
  if (cfg.params.noise_q != -1.0 && cfg.params.noise_q < 0.0)
    throw ConfigError("noise_q must lie in [0, 1] or be null");

  if (j.contains("tail_sizes")) cfg.analysis.tail_fractions = get_as<std::vector<double>>(j, "tail_sizes");
  if (j.contains("acf_max_lag")) cfg.analysis.acf_max_lag = get_int(j, "acf_max_lag");
  if (j.contains("L_max")) cfg.analysis.max_var_lag = get_int(j, "L_max");
  if (j.contains("irf_horizon")) cfg.analysis.irf_horizon = get_int(j, "irf_horizon");
  if (j.contains("alpha")) cfg.analysis.alpha = get_as<double>(j, "alpha");
  if (j.contains("volatility_basis"))
    cfg.analysis.volatility_basis = parse_basis(get_as<std::string>(j, "volatility_basis"));
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      throw ConfigError("seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out")) cfg.out_dir = get_as<std::string>(j, "out");
  cfg.validate();
  return cfg;
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  json j = cfg.to_json();
  j.erase("out");  // where results go does not change what they are
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<ConvergenceRow> summarize(const std::vector<RunTrace>& traces, const GameConfig& cfg) {
  std::map<double, std::vector<const RunTrace*>> by_c;
  for (const auto& t : traces) by_c[t.capacity].push_back(&t);
  std::vector<ConvergenceRow> rows;
  for (const auto& [c, group] : by_c) {
    GameConfig g = cfg;
    g.capacity = c;
    std::vector<double> rates, errors;
    for (const RunTrace* t : group) {
      if (static_cast<int>(t->attendance.size()) <= g.burn_in) continue;
      double sum = 0.0;
      for (std::size_t i = static_cast<std::size_t>(g.burn_in); i < t->attendance.size(); ++i)
        sum += t->attendance[i];
      const auto n = static_cast<double>(t->attendance.size() - static_cast<std::size_t>(g.burn_in));
      rates.push_back(sum / n / g.n_agents);
      errors.push_back(utilisation_error(t->attendance, g));
    }
    ConvergenceRow row;
    row.capacity = c;
    row.runs = static_cast<int>(rates.size());
    std::tie(row.mean_rate, row.std_rate) = mean_std(rates);
    std::tie(row.mean_error, row.std_error) = mean_std(errors);
    rows.push_back(row);
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  ExperimentResult result;
  for (ModelKind kind : cfg.models) {
    ModelSweep sweep;
    sweep.kind = kind;
    for (double c : cfg.capacities) {
      CapacitySweep cap;
      cap.capacity = c;
      cap.traces.resize(static_cast<std::size_t>(cfg.runs));
      cap.analyses.resize(static_cast<std::size_t>(cfg.runs));
      sweep.capacities.push_back(std::move(cap));
    }
    result.models.push_back(std::move(sweep));
  }

  const std::vector<Slot> slots = slots_of(result);
  parallel_for(slots.size(), jobs, [&](std::size_t i) {
    const Slot& s = slots[i];
    ModelSweep& model = result.models[s.model];
    CapacitySweep& cap = model.capacities[s.capacity];
    const GameConfig game = cfg.game_at(cap.capacity);
    const int run = static_cast<int>(s.run);
    const std::uint64_t seed = derive_seed(cfg.seed, cap.capacity, run, model.kind);
    RunTrace& trace = cap.traces[s.run];
    try {
      trace = simulate_run(game, cfg.params_for(model.kind), seed, run);
    } catch (const std::exception& e) {
      trace = RunTrace{};
      trace.run_id = run;
      trace.seed = seed;
      trace.capacity = cap.capacity;
      cap.analyses[s.run].run_id = run;
      cap.analyses[s.run].failures["simulation"] = e.what();
      return;
    }
    trace.capacity = cap.capacity;
    cap.analyses[s.run] = isolated_analysis(trace, game, cfg.analysis);
  });
  aggregate(result, cfg);
  return result;
}

void analyze_result(ExperimentResult& result, const ExperimentConfig& cfg, int jobs) {
  const std::vector<Slot> slots = slots_of(result);
  for (auto& model : result.models)
    for (auto& cap : model.capacities) cap.analyses.assign(cap.traces.size(), RunAnalysis{});
  parallel_for(slots.size(), jobs, [&](std::size_t i) {
    const Slot& s = slots[i];
    CapacitySweep& cap = result.models[s.model].capacities[s.capacity];
    cap.analyses[s.run] = isolated_analysis(cap.traces[s.run], cfg.game_at(cap.capacity), cfg.analysis);
  });
  aggregate(result, cfg);
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::string trace_file_name(double capacity, int run_index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "run_%s_%03d.csv", capacity_label(capacity).c_str(), run_index);
  return buf;
}

void write_trace_csv(const RunTrace& trace, const fs::path& path) {
  std::string out = "t,attendance,diversity,mean_beta\n";
  out.reserve(out.size() + trace.attendance.size() * 40);
  for (std::size_t t = 0; t < trace.attendance.size(); ++t)
    out += std::to_string(t) + ',' + std::to_string(trace.attendance[t]) + ',' +
           num(trace.diversity[t]) + ',' + num(trace.mean_beta[t]) + '\n';
  write_text(path, out);
}

RunTrace read_trace_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "t,attendance,diversity,mean_beta")
    throw DomainError(path.string() + ": unexpected trace header");
  RunTrace trace;
  std::size_t expected_t = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string_view, 4> fields;
    std::string_view rest(line);
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (f + 1 == fields.size()))
        throw DomainError(path.string() + ": malformed row '" + line + "'");
      fields[f] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    auto parse = [&](std::string_view s, auto& value) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DomainError(path.string() + ": bad number '" + std::string(s) + "'");
    };
    std::size_t t = 0;
    int attendance = 0;
    double diversity = 0.0, mean_beta = 0.0;
    parse(fields[0], t);
    parse(fields[1], attendance);
    parse(fields[2], diversity);
    parse(fields[3], mean_beta);
    if (t != expected_t++) throw DomainError(path.string() + ": rounds out of order");
    trace.attendance.push_back(attendance);
    trace.diversity.push_back(diversity);
    trace.mean_beta.push_back(mean_beta);
  }
  return trace;
}

void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result, const fs::path& dir) {
  for (const auto& model : result.models) {
    const fs::path sub = dir / std::string(to_string(model.kind));
    fs::create_directories(sub);
    write_text(sub / "summary.json", summary_json(cfg, model).dump(2) + "\n");
    write_text(sub / "tail_report.json", tail_json(model).dump(2) + "\n");
    write_text(sub / "granger_report.json", granger_json(model).dump(2) + "\n");
    write_text(sub / "acf.csv", acf_csv(model));
    write_text(sub / "irf.csv", irf_csv(model));
    write_text(sub / "aic_rank.csv", aic_csv(model));
  }
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  json models = json::object();
  for (const auto& model : result.models) {
    const fs::path sub = dir / std::string(to_string(model.kind));
    fs::create_directories(sub);
    json caps = json::array();
    for (const auto& cap : model.capacities) {
      json runs = json::array();
      for (const auto& trace : cap.traces) {
        const std::string file = trace_file_name(cap.capacity, trace.run_id);
        write_trace_csv(trace, sub / file);
        runs.push_back({{"run", trace.run_id}, {"seed", trace.seed}, {"file", file}});
      }
      caps.push_back({{"c", cap.capacity}, {"runs", runs}});
    }
    models[std::string(to_string(model.kind))] = caps;
  }
  const json manifest = {{"config", cfg.to_json()}, {"config_hash", hash}, {"models", models}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_reports(cfg, result, dir);
}

std::pair<ExperimentConfig, ExperimentResult> load_experiment(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw ConfigError((dir / "manifest.json").string() + ": " + e.what());
  }
  if (!manifest.contains("config") || !manifest.contains("models"))
    throw ConfigError("manifest lacks config or models");
  ExperimentConfig cfg = ExperimentConfig::from_json(manifest["config"]);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  if (manifest.value("config_hash", std::string{}) != hash)
    throw ConfigError("manifest config hash does not match its config");

  ExperimentResult result;
  try {
    for (ModelKind kind : cfg.models) {
      const std::string name(to_string(kind));
      ModelSweep sweep;
      sweep.kind = kind;
      for (const auto& c_entry : manifest["models"].at(name)) {
        CapacitySweep cap;
        cap.capacity = c_entry.at("c").get<double>();
        for (const auto& r : c_entry.at("runs")) {
          RunTrace trace = read_trace_csv(dir / name / r.at("file").get<std::string>());
          trace.run_id = r.at("run").get<int>();
          trace.seed = r.at("seed").get<std::uint64_t>();
          trace.capacity = cap.capacity;
          cap.traces.push_back(std::move(trace));
        }
        sweep.capacities.push_back(std::move(cap));
      }
      result.models.push_back(std::move(sweep));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return {cfg, std::move(result)};
}

void write_figure_data(const ExperimentConfig& cfg, const ExperimentResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  std::string fig1 = "model,c,mean_rate,std_rate,mean_error,std_error\n";
  std::string fig2 = "model,c,t,mean_rate,std_rate\n";
  std::string fig3 = "model,c,tail,alpha\n";
  std::string fig4 = "model,c,lag,r,band\n";
  std::string fig6 = "model,c,horizon,median,q25,q75\n";
  std::string fig7 = "model,c,lag,median_rank,q25,q75\n";
  std::string table1 = "model,c,sigma_rate_pct,std_pct,runs\n";
  std::string table2 = "model,tail,mean_alpha,std_alpha,capacities\n";
  std::string table3 = "model,c,runs_tested,hmp,hmp_adjusted,significant\n";

  for (const auto& model : result.models) {
    const std::string name(to_string(model.kind));
    std::vector<RunTrace> all;
    for (const auto& cap : model.capacities) all.insert(all.end(), cap.traces.begin(), cap.traces.end());
    for (const auto& row : summarize(all, cfg.game))
      fig1 += name + ',' + num(row.capacity) + ',' + num(row.mean_rate) + ',' + num(row.std_rate) +
              ',' + num(row.mean_error) + ',' + num(row.std_error) + '\n';

    std::map<double, std::vector<double>> alphas_by_tail;
    for (const auto& cap : model.capacities) {
      const std::string c = num(cap.capacity);
      const CapacityReport& rep = cap.report;

      std::size_t rounds = 0;
      for (const auto& t : cap.traces) rounds = std::max(rounds, t.attendance.size());
      for (std::size_t t = 0; t < rounds; ++t) {
        std::vector<double> rates;
        for (const auto& tr : cap.traces)
          if (t < tr.attendance.size()) rates.push_back(tr.attendance[t] / double(cfg.game.n_agents));
        const auto [m, s] = mean_std(rates);
        fig2 += name + ',' + c + ',' + std::to_string(t) + ',' + num(m) + ',' + num(s) + '\n';
      }

      for (const auto& h : rep.hill) {
        fig3 += name + ',' + c + ',' + num(h.tail_fraction) + ',' +
                (h.alpha ? num(*h.alpha) : std::string("nan")) + '\n';
        if (h.alpha) alphas_by_tail[h.tail_fraction].push_back(*h.alpha);
      }

      for (std::size_t k = 0; k < rep.mean_acf.size(); ++k)
        fig4 += name + ',' + c + ',' + std::to_string(k) + ',' + num(rep.mean_acf[k]) + ',' +
                num(rep.acf_band) + '\n';

      std::vector<const GrangerRun*> granger;
      for (const auto& a : cap.analyses)
        if (a.granger) granger.push_back(&*a.granger);
      if (!granger.empty()) {
        for (int h = 0; h <= cfg.analysis.irf_horizon; ++h) {
          std::vector<double> v;
          for (const GrangerRun* g : granger)
            if (static_cast<std::size_t>(h) < g->irf.size()) v.push_back(g->irf[static_cast<std::size_t>(h)]);
          if (v.empty()) continue;
          fig6 += name + ',' + c + ',' + std::to_string(h) + ',' + num(percentile(v, 0.5)) + ',' +
                  num(percentile(v, 0.25)) + ',' + num(percentile(v, 0.75)) + '\n';
        }
        for (int l = 1; l <= cfg.analysis.max_var_lag; ++l) {
          std::vector<double> v;
          for (const GrangerRun* g : granger) {
            const std::vector<int> ranks = aic_ranks(g->aic);
            if (static_cast<std::size_t>(l) <= ranks.size()) v.push_back(ranks[static_cast<std::size_t>(l - 1)]);
          }
          if (v.empty()) continue;
          fig7 += name + ',' + c + ',' + std::to_string(l) + ',' + num(percentile(v, 0.5)) + ',' +
                  num(percentile(v, 0.25)) + ',' + num(percentile(v, 0.75)) + '\n';
        }
      }

      std::vector<double> sigmas;
      for (const auto& a : cap.analyses)
        if (a.sigma_rate) sigmas.push_back(100.0 * *a.sigma_rate);
      const auto [sm, ss] = mean_std(sigmas);
      table1 += name + ',' + c + ',' + num(sm) + ',' + num(ss) + ',' + std::to_string(sigmas.size()) + '\n';

      table3 += name + ',' + c + ',' + std::to_string(granger.size()) + ',' +
                (rep.hmp ? num(*rep.hmp) : std::string("nan")) + ',' +
                (rep.hmp_adjusted ? num(*rep.hmp_adjusted) : std::string("nan")) + ',' +
                (rep.granger_significant ? "1" : "0") + '\n';
    }
    for (const auto& [tail, alphas] : alphas_by_tail) {
      const auto [m, s] = mean_std(alphas);
      table2 += name + ',' + num(tail) + ',' + num(m) + ',' + num(s) + ',' +
                std::to_string(alphas.size()) + '\n';
    }
  }

  write_text(dir / "fig1_utilisation.csv", fig1);
  write_text(dir / "fig2_timeseries.csv", fig2);
  write_text(dir / "fig3_violin.csv", fig3);
  write_text(dir / "fig4_acf.csv", fig4);
  write_text(dir / "fig6_irf.csv", fig6);
  write_text(dir / "fig7_aic_rank.csv", fig7);
  write_text(dir / "table1_sigma.csv", table1);
  write_text(dir / "table2_hill.csv", table2);
  write_text(dir / "table3_granger.csv", table3);
}

}  // namespace elfarol
