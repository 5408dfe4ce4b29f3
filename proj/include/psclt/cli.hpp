#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "psclt/error.hpp"

namespace psclt {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int check_failed = 1;
inline constexpr int verification_failed = 2;
inline constexpr int group_coding_violation = 3;
inline constexpr int invalid_input = 64;
inline constexpr int budget_exceeded = 69;
}  // namespace exit_code

int exit_code_for(const Error& e);

struct InspectOptions {
  std::optional<int> free_rank;
  std::optional<int> genus;
  std::string automaton_path;
  int radius = 4;
  std::string out = "inspect_out";
};

/// Writes automaton.json, verification.json and spectrum.json under out.
int cmd_inspect(const InspectOptions& options, std::ostream& log);

struct RunOptions {
  std::string config_path;
  bool check = false;
  int workers = 1;
  std::string out = "run_out";
};

/// Runs the config (report.json + CSVs) and, with check, the built-in tolerance suite (check.json).
int cmd_run(const RunOptions& options, std::ostream& log);

}  // namespace psclt
