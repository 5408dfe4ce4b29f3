#include <iostream>

#include <CLI11.hpp>

#include "psclt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Markov codings of hyperbolic groups and boundary limit laws"};
  app.require_subcommand(1);

  psclt::InspectOptions inspect;
  auto* in = app.add_subcommand("inspect", "build or load a coding, verify it, write its spectrum");
  auto* free_opt = in->add_option("--free", inspect.free_rank, "free group rank");
  auto* surface_opt = in->add_option("--surface", inspect.genus, "closed surface genus");
  auto* file_opt = in->add_option("--automaton", inspect.automaton_path, "automaton JSON file");
  free_opt->excludes(surface_opt)->excludes(file_opt);
  surface_opt->excludes(file_opt);
  in->add_option("--radius", inspect.radius, "verification radius")->capture_default_str();
  in->add_option("--out", inspect.out, "output directory")->capture_default_str();

  psclt::RunOptions run;
  auto* rn = app.add_subcommand("run", "run an experiment config and/or the built-in checks");
  rn->add_option("--config", run.config_path, "experiment config JSON");
  rn->add_flag("--check", run.check, "run the tolerance suite; nonzero exit on any breach");
  rn->add_option("--workers", run.workers, "OpenMP worker count")->capture_default_str();
  rn->add_option("--out", run.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : psclt::exit_code::invalid_input;
  }
  if (in->parsed()) return psclt::cmd_inspect(inspect, std::cerr);
  return psclt::cmd_run(run, std::cerr);
}
