#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psclt/statistics.hpp"

namespace psclt {

enum class RunMode { exact, monte_carlo, both };

struct ExperimentConfig {
  // Exactly one of group / automaton_path is set.
  std::optional<GroupSpec> group;
  std::string automaton_path;
  nlohmann::json observable;
  RunMode mode = RunMode::exact;
  std::vector<int> n_list;
  std::size_t rays = 10000;
  std::uint64_t seed = 1;
  Arithmetic arithmetic = Arithmetic::rational;
  std::vector<int> cesaro_tv;        // n values for the depth-1 Cesaro diagnostic
  std::vector<int> truncation_tail;  // n values for the tail diagnostic
  std::size_t budget = 50000000;
};

/// Throws InvalidConfig. Relative automaton paths resolve against base_dir.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig read_config(const std::string& path);

struct KsEntry {
  int n = 0;
  double value = 0.0;
  std::string mode;  // "exact" or "mc"
};

struct CltReport {
  std::string observable;
  double lambda = 0.0;
  double lambda_stderr = 0.0;
  bool lambda_exact = false;
  double sigma2 = 0.0;
  std::vector<KsEntry> ks;
  std::optional<RateFit> slope;
  bool degenerate = false;
  std::optional<std::vector<std::string>> witness_cycle;
  std::vector<std::string> warnings;

  std::vector<ExactDistribution> distributions;       // exact mode, one per n
  std::vector<std::pair<int, double>> cesaro_series;  // diagnostics
  std::vector<std::pair<int, double>> tail_series;

  nlohmann::json to_json() const;
};

CltReport run_clt_experiment(const ExperimentConfig& config, int workers = 1);

/// report.json, distribution_n<N>.csv, and diagnostic CSVs when present.
void write_report(const CltReport& report, const std::string& dir);
void write_distribution_csv(const std::string& path, const ExactDistribution& dist);

}  // namespace psclt
