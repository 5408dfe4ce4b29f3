#include "psclt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "psclt/error.hpp"

namespace psclt {

namespace {

std::vector<int> positive_increasing(const nlohmann::json& j, const std::string& what) {
  const auto v = j.get<std::vector<int>>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 1) throw Error(ErrorCode::InvalidConfig, what + " entries must be >= 1");
    if (i > 0 && v[i] <= v[i - 1]) throw Error(ErrorCode::InvalidConfig, what + " must be increasing");
  }
  return v;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  static const std::set<std::string> known{"group", "observable", "mode", "n_list", "rays", "seed",
                                           "arithmetic", "diagnostics", "budget"};
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");

    const auto& g = j.at("group");
    if (g.contains("free")) c.group = GroupSpec::free_group(g.at("free").get<int>());
    else if (g.contains("surface")) c.group = GroupSpec::surface_group(g.at("surface").get<int>());
    else if (g.contains("automaton")) {
      const std::filesystem::path p = g.at("automaton").get<std::string>();
      c.automaton_path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
    } else {
      throw Error(ErrorCode::InvalidConfig, "group needs one of free, surface, automaton");
    }

    c.observable = j.at("observable");
    const auto mode = j.value("mode", std::string("exact"));
    if (mode == "exact") c.mode = RunMode::exact;
    else if (mode == "monte_carlo") c.mode = RunMode::monte_carlo;
    else if (mode == "both") c.mode = RunMode::both;
    else throw Error(ErrorCode::InvalidConfig, "mode must be exact, monte_carlo or both");

    c.n_list = positive_increasing(j.at("n_list"), "n_list");
    if (c.n_list.empty()) throw Error(ErrorCode::InvalidConfig, "n_list must be non-empty");
    c.rays = j.value("rays", c.rays);
    if (c.mode != RunMode::exact && c.rays < 100)
      throw Error(ErrorCode::InvalidConfig, "rays must be >= 100 in monte_carlo mode");
    c.seed = j.value("seed", c.seed);
    const auto arithmetic = j.value("arithmetic", std::string("rational"));
    if (arithmetic == "rational") c.arithmetic = Arithmetic::rational;
    else if (arithmetic == "float") c.arithmetic = Arithmetic::floating;
    else throw Error(ErrorCode::InvalidConfig, "arithmetic must be rational or float");
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      if (d.contains("cesaro_tv")) c.cesaro_tv = positive_increasing(d.at("cesaro_tv"), "cesaro_tv");
      if (d.contains("truncation_tail")) {
        for (int n : d.at("truncation_tail").get<std::vector<int>>())
          if (n < 0) throw Error(ErrorCode::InvalidConfig, "truncation_tail entries must be >= 0");
        c.truncation_tail = d.at("truncation_tail").get<std::vector<int>>();
      }
    }
    c.budget = j.value("budget", c.budget);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return c;
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json CltReport::to_json() const {
  nlohmann::json j;
  j["observable"] = observable;
  j["lambda"] = {{"value", lambda}, {"stderr", lambda_stderr}, {"exact", lambda_exact}};
  j["sigma2"] = sigma2;
  j["ks"] = nlohmann::json::array();
  for (const auto& k : ks) j["ks"].push_back({{"n", k.n}, {"value", k.value}, {"mode", k.mode}});
  if (slope) j["slope"] = {{"value", slope->slope}, {"ci", {slope->ci_low, slope->ci_high}}};
  else j["slope"] = nullptr;
  j["degenerate"] = degenerate;
  j["witness_cycle"] = witness_cycle ? nlohmann::json(*witness_cycle) : nlohmann::json(nullptr);
  j["warnings"] = warnings;
  return j;
}

namespace {

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BudgetExceeded) throw Error(ErrorCode::BudgetExceeded, "stage " + name + ": " + e.what());
    throw;
  }
}

}  // namespace

CltReport run_clt_experiment(const ExperimentConfig& config, int workers) {
  if (config.n_list.empty()) throw Error(ErrorCode::InvalidConfig, "n_list must be non-empty");
  CltReport r;
  const MarkovAutomaton base = config.group ? build_automaton(*config.group) : read_automaton(config.automaton_path);
  if (!base.group()) throw Error(ErrorCode::InvalidConfig, "automaton does not name its group");
  const GroupSpec group = *base.group();
  const CodingModel model = stage("analyze", [&] { return analyze(base, config.arithmetic); });
  for (const auto& w : model.growth.warnings) r.warnings.push_back(w);
  const Observable obs = observable_from_json(group, config.observable);
  for (const auto& w : obs.warnings) r.warnings.push_back(w);
  r.observable = obs.describe();

  const bool exact_mode = config.mode != RunMode::monte_carlo;
  const bool mc_mode = config.mode != RunMode::exact;
  const int n_max = config.n_list.back();

  for (int n : config.cesaro_tv) r.cesaro_series.emplace_back(n, stage("cesaro_tv", [&] { return cesaro_tv_depth1(model, n); }).value);
  for (int n : config.truncation_tail)
    r.tail_series.emplace_back(n, stage("truncation_tail", [&] { return truncation_tail(model, n); }).value);

  std::optional<EdgePotential> potential;
  if (obs.window) potential = stage("window_lift", [&] { return window_lift(model.automaton, obs); });
  if (exact_mode && !potential)
    throw Error(ErrorCode::InvalidConfig, "exact mode needs a window-local observable; use monte_carlo");

  std::optional<RaySamples> samples;
  if (mc_mode)
    samples = stage("monte_carlo", [&] { return sample_observable(model, obs, config.n_list, config.rays, config.seed, workers); });

  if (potential) {
    const auto drift = exact_drift(*potential, model);
    r.lambda = drift.value;
    r.lambda_exact = true;
  } else {
    r.lambda = drift_from_samples(samples->column(samples->ns.size() - 1), n_max).value;
  }
  if (samples) r.lambda_stderr = drift_from_samples(samples->column(samples->ns.size() - 1), n_max).stderr_;

  if (exact_mode) {
    DpOptions options;
    options.parallel = workers > 1;
    options.workers = workers;
    options.budget = config.budget;
    for (int n : config.n_list)
      r.distributions.push_back(stage("exact_distribution(n=" + std::to_string(n) + ")",
                                      [&] { return exact_distribution(*potential, model, n, options); }));
    r.sigma2 = estimate_variance(r.distributions.back(), r.lambda);
  } else {
    r.sigma2 = estimate_variance(samples->column(samples->ns.size() - 1), n_max, r.lambda);
  }

  if (potential) {
    const auto verdict = degeneracy_witness(*potential, model, r.lambda);
    r.degenerate = verdict.degenerate;
    if (!verdict.degenerate) r.witness_cycle = verdict.cycle;
  } else {
    r.degenerate = !(r.sigma2 > 1e-12);
    if (r.lambda_stderr * std::sqrt(static_cast<double>(n_max)) > 0.1 * std::sqrt(r.sigma2))
      r.warnings.push_back("estimated drift error is not small against sigma at n = " + std::to_string(n_max) +
                           "; increase rays");
  }
  if (r.degenerate) return r;

  std::vector<std::pair<int, double>> exact_points, mc_points;
  if (exact_mode)
    for (std::size_t i = 0; i < config.n_list.size(); ++i) {
      const double ks = ks_distance(r.distributions[i], r.lambda, r.sigma2);
      r.ks.push_back({config.n_list[i], ks, "exact"});
      exact_points.emplace_back(config.n_list[i], ks);
    }
  if (samples)
    for (std::size_t i = 0; i < samples->ns.size(); ++i) {
      const double ks = ks_distance(samples->column(i), samples->ns[i], r.lambda, r.sigma2);
      r.ks.push_back({samples->ns[i], ks, "mc"});
      mc_points.emplace_back(samples->ns[i], ks);
    }
  try {
    r.slope = rate_fit(exact_mode ? exact_points : mc_points);
    for (const auto& w : r.slope->warnings) r.warnings.push_back(w);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument) throw;
    r.warnings.push_back(std::string("no rate fit: ") + e.what());
  }
  return r;
}

void write_distribution_csv(const std::string& path, const ExactDistribution& dist) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "value,probability\n";
  char buf[64];
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", dist.value(i), dist.probabilities[i]);
    out << buf;
  }
}

void write_report(const CltReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  {
    std::ofstream out(d / "report.json");
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (d / "report.json").string());
    out << report.to_json().dump(2) << "\n";
  }
  for (const auto& dist : report.distributions)
    write_distribution_csv((d / ("distribution_n" + std::to_string(dist.n) + ".csv")).string(), dist);
  if (!report.cesaro_series.empty()) write_series_csv((d / "cesaro_tv.csv").string(), report.cesaro_series);
  if (!report.tail_series.empty()) write_series_csv((d / "truncation_tail.csv").string(), report.tail_series);
}

}  // namespace psclt
