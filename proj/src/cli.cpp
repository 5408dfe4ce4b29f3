#include "psclt/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "psclt/experiment.hpp"

namespace psclt {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::GroupCodingViolation: return exit_code::group_coding_violation;
    case ErrorCode::BudgetExceeded:
    case ErrorCode::RadiusTooLarge: return exit_code::budget_exceeded;
    default: return exit_code::invalid_input;
  }
}

namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::invalid_input;
  }
}

}  // namespace

int cmd_inspect(const InspectOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const int given = (o.free_rank ? 1 : 0) + (o.genus ? 1 : 0) + (o.automaton_path.empty() ? 0 : 1);
    if (given != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --free, --surface, --automaton");
    if (o.radius < 0) throw Error(ErrorCode::InvalidArgument, "--radius must be >= 0");
    const MarkovAutomaton m = o.free_rank ? build_free_automaton(*o.free_rank)
                              : o.genus   ? build_surface_automaton(*o.genus)
                                          : read_automaton(o.automaton_path);
    std::filesystem::create_directories(o.out);
    const std::filesystem::path dir(o.out);
    write_automaton(m, (dir / "automaton.json").string());

    const auto report = verify_bijection(m, o.radius);
    write_json(dir / "verification.json", report.to_json());
    if (!report.passed) {
      log << "verification failed at shell n = " << report.first_failure << "\n";
      return exit_code::verification_failed;
    }
    log << "verification passed to radius " << o.radius << "\n";

    const CodingModel model = analyze(m, Arithmetic::rational);
    write_json(dir / "spectrum.json", spectrum_to_json(model));
    log << "lambda = " << model.growth.lambda << "\n";
    return exit_code::ok;
  });
}

namespace {

struct Check {
  std::string name;
  double value;
  std::string bound;
  bool pass;
};

std::vector<Check> check_suite() {
  std::vector<Check> checks;
  auto add = [&](std::string name, double value, std::string bound, bool pass) {
    checks.push_back({std::move(name), value, std::move(bound), pass});
  };
  const GroupSpec f2 = GroupSpec::free_group(2);

  const auto report = verify_bijection(build_free_automaton(2), 8);
  add("free2_bijection_radius8", report.passed ? 1.0 : 0.0, "== 1", report.passed);
  for (int k : {2, 3}) {
    const double lambda = analyze(build_free_automaton(k), Arithmetic::rational).growth.lambda;
    add("free" + std::to_string(k) + "_lambda", lambda, "|x - " + std::to_string(2 * k - 1) + "| <= 1e-10",
        std::abs(lambda - (2 * k - 1)) <= 1e-10);
  }

  const CodingModel model = analyze(build_automaton(f2), Arithmetic::rational);
  double worst = 0.0;
  for (int n = 1; n <= 64; ++n) worst = std::max(worst, std::abs(cesaro_tv_depth1(model, n).value * n - 1.0));
  add("cesaro_tv_times_n", worst, "|x| <= 1e-12 (max deviation from 1)", worst <= 1e-12);

  const auto hom = make_homomorphism(f2, {{"a", 1.0}, {"b", 0.0}});
  const auto hom_pot = window_lift(model.automaton, hom);
  const auto hom_drift = exact_drift(hom_pot, model);
  add("hom_lambda_exact", hom_drift.value, "== 0", hom_drift.exact && *hom_drift.exact == 0);
  std::vector<std::pair<int, double>> points;
  double sigma2 = 0.0;
  bool monotone = true;
  for (int n : {25, 100, 400}) {
    const auto d = exact_distribution(hom_pot, model, n);
    const double ks = ks_distance(d, 0.0, 1.0);
    if (!points.empty() && ks > points.back().second) monotone = false;
    points.emplace_back(n, ks);
    if (n == 400) sigma2 = estimate_variance(d, 0.0);
  }
  add("hom_sigma2_n400", sigma2, "|x - 1| <= 0.05", std::abs(sigma2 - 1.0) <= 0.05);
  add("hom_ks_monotone", monotone ? 1.0 : 0.0, "== 1", monotone);
  add("hom_ks_n400", points.back().second, "<= 0.06", points.back().second <= 0.06);
  const double slope = rate_fit(points).slope;
  add("hom_ks_slope", slope, "<= -0.4", slope <= -0.4);
  const auto mc = estimate_drift(model, hom, 1000, 10000, 20240601);
  add("hom_mc_drift", mc.value, "|x| <= 3 stderr", std::abs(mc.value) <= 3.0 * mc.stderr_);

  const auto wl = make_weighted_length(f2, {{"a", 1.0}, {"b", 2.0}});
  const auto wl_pot = window_lift(model.automaton, wl);
  const auto wl_drift = exact_drift(wl_pot, model);
  add("weighted_length_lambda", wl_drift.value, "== 3/2", wl_drift.exact && *wl_drift.exact == Rational(3, 2));
  const double wl_var = estimate_variance(exact_distribution(wl_pot, model, 400), wl_drift.value);
  add("weighted_length_sigma2", wl_var, "|x - 0.125| <= 0.00625", std::abs(wl_var - 0.125) <= 0.00625);

  const auto len = make_weighted_length(f2, {{"a", 1.0}, {"b", 1.0}});
  const auto len_pot = window_lift(model.automaton, len);
  const auto len_verdict = degeneracy_witness(len_pot, model, 1.0);
  add("word_length_degenerate", len_verdict.degenerate ? 1.0 : 0.0, "== 1", len_verdict.degenerate);
  const auto hom_verdict = degeneracy_witness(hom_pot, model, 0.0);
  add("hom_witness_sum", hom_verdict.period_sum, "!= 0", !hom_verdict.degenerate && hom_verdict.period_sum != 0.0);
  const auto brooks = make_brooks(f2, f2.alphabet().parse("ab"));
  const auto brooks_pot = window_lift(model.automaton, brooks);
  const auto brooks_verdict = degeneracy_witness(brooks_pot, model, exact_drift(brooks_pot, model).value);
  add("brooks_ab_witness_sum", brooks_verdict.period_sum, "!= 0",
      !brooks_verdict.degenerate && brooks_verdict.period_sum != 0.0);
  return checks;
}

}  // namespace

int cmd_run(const RunOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    if (o.config_path.empty() && !o.check) throw Error(ErrorCode::InvalidArgument, "give --config and/or --check");
    if (o.workers < 1) throw Error(ErrorCode::InvalidArgument, "--workers must be >= 1");
    std::filesystem::create_directories(o.out);
    const std::filesystem::path dir(o.out);
    int code = exit_code::ok;
    if (!o.config_path.empty()) {
      const auto config = read_config(o.config_path);
      const auto report = run_clt_experiment(config, o.workers);
      write_report(report, o.out);
      log << "wrote " << (dir / "report.json").string() << "\n";
    }
    if (o.check) {
      const auto checks = check_suite();
      nlohmann::json j{{"checks", nlohmann::json::array()}};
      bool all = true;
      for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
        log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.bound << ")\n";
        all = all && c.pass;
      }
      j["passed"] = all;
      write_json(dir / "check.json", j);
      if (!all) code = exit_code::check_failed;
    }
    return code;
  });
}

}  // namespace psclt
