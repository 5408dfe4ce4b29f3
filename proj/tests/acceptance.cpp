// Acceptance suite: one PASS/FAIL line per criterion.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "psclt/cli.hpp"
#include "psclt/fixtures.hpp"
#include "psclt/statistics.hpp"

using namespace psclt;
namespace fs = std::filesystem;

namespace tol {
constexpr double lambda = 1e-10;
constexpr double cesaro_slope = 0.05;
constexpr double tail_slope_rel = 0.10;
constexpr double mc_stderr = 3.0;
constexpr double ks_n400 = 0.06;
constexpr double ks_slope = -0.4;
constexpr double variance_rel = 0.05;
constexpr double degenerate_var = 1e-8;
constexpr double nondegenerate_var = 0.05;
constexpr double tv = 0.005;
constexpr double schottky_ks = 0.1;
}  // namespace tol

namespace {

const GroupSpec f2 = GroupSpec::free_group(2);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / static_cast<double>(xs.size());
    my += ys[i] / static_cast<double>(ys.size());
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

const CodingModel& free2() {
  static const CodingModel m = analyze(build_free_automaton(2), Arithmetic::rational);
  return m;
}

Observable hom() { return make_homomorphism(f2, {{"a", 1.0}, {"b", 0.0}}); }
Observable wl12() { return make_weighted_length(f2, {{"a", 1.0}, {"b", 2.0}}); }
Observable wordlen() { return make_weighted_length(f2, {{"a", 1.0}, {"b", 1.0}}); }

Outcome coding() {
  Outcome o;
  const auto free = verify_bijection(build_free_automaton(2), 8);
  bool shells = free.shells.size() == 9;
  std::uint64_t expect = 4;
  for (std::size_t n = 1; shells && n < free.shells.size(); ++n, expect *= 3)
    shells = free.shells[n].shell == expect && free.shells[n].paths == expect && free.shells[n].injective;
  o.require(free.passed && shells, "free rank 2 radius 8");
  const auto surface = verify_bijection(build_surface_automaton(2), 4);
  o.require(surface.passed, "genus 2 radius 4 (shell 4 = " + std::to_string(surface.shells.back().shell) + ")");
  return o;
}

Outcome spectrum() {
  Outcome o;
  for (int k : {2, 3}) {
    const double lambda = growth_rate(transition_matrix(build_free_automaton(k), TransitionMatrix::Variant::prime)).lambda;
    o.require(std::abs(lambda - (2 * k - 1)) <= tol::lambda, "lambda(F" + std::to_string(k) + ") = " + fmt(lambda));
  }
  for (const auto& m : {build_free_automaton(2), build_free_automaton(3), build_surface_automaton(2)}) {
    const auto t = transition_matrix(augment(m), TransitionMatrix::Variant::full);
    bool ok = true;
    try {
      decompose(t, growth_rate(t).lambda, true);
    } catch (const Error&) {
      ok = false;
    }
    o.require(ok, "disjoint " + m.group()->describe());
  }
  bool rejected = false;
  try {
    const auto t = transition_matrix(augment(two_block_fixture(true)), TransitionMatrix::Variant::full);
    decompose(t, 3.0, true);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::GroupCodingViolation;
  }
  o.require(rejected, "connected fixture rejected");
  return o;
}

Outcome measure_calculus() {
  Outcome o;
  const CylinderMeasure nu(free2());
  const auto& m = free2().automaton;
  bool sums = true, single = true;
  for (int n = 1; n <= 12; ++n) {
    Rational total = 0;
    Path p{0};
    std::function<void()> rec = [&] {
      if (static_cast<int>(p.size()) == n + 1) {
        total += nu.mass_exact(p);
        return;
      }
      for (int e : m.out(p.back())) {
        const auto& edge = m.edges()[static_cast<std::size_t>(e)];
        if (edge.label == kIdentityLabel) continue;
        p.push_back(edge.to);
        rec();
        p.pop_back();
      }
    };
    rec();
    sums = sums && total == 1;
    Rational expect(1, 4);
    for (int k = 1; k < n; ++k) expect /= 3;
    single = single && nu.mass_exact(encode(m, Word(static_cast<std::size_t>(n), 0))) == expect;
  }
  o.require(sums, "depth sums exactly 1 for n <= 12");
  o.require(single, "single cylinder (1/4) 3^-(n-1)");
  return o;
}

Outcome pushforward_and_cesaro() {
  Outcome o;
  const auto t = pushforward_table(free2(), 64);
  bool alpha = t.alpha_exact.has_value();
  for (int k = 1; alpha && k <= 64; ++k)
    for (int v = 1; v <= 4; ++v)
      alpha = alpha && (*t.alpha_exact)[static_cast<std::size_t>(k) * t.n + static_cast<std::size_t>(v)] == 1;
  o.require(alpha, "alpha_v^k = 1 for k <= 64");
  const auto series = cesaro_tv_series(free2(), 512);
  bool exact = true;
  std::vector<double> xs, ys;
  for (int n = 1; n <= 512; ++n) {
    const auto& v = series[static_cast<std::size_t>(n - 1)];
    exact = exact && v.exact && *v.exact * n == 1;
    if ((n & (n - 1)) == 0) {
      xs.push_back(std::log(n));
      ys.push_back(std::log(v.value));
    }
  }
  o.require(exact, "n tv(n) = 1 for n <= 512");
  const double slope = fit_slope(xs, ys);
  o.require(std::abs(slope + 1.0) <= tol::cesaro_slope, "slope " + fmt(slope));
  return o;
}

Outcome truncation() {
  Outcome o;
  bool zero = true;
  for (int n = 1; n <= 40; ++n) zero = zero && truncation_tail(free2(), n).exact && *truncation_tail(free2(), n).exact == 0;
  o.require(zero, "tail = 0 on F2 for 1 <= n <= 40");
  const auto model = analyze(transient_chain_fixture(), Arithmetic::rational);
  std::vector<double> xs, ys;
  for (int n = 10; n <= 40; ++n) {
    xs.push_back(n);
    ys.push_back(std::log(truncation_tail(model, n).value));
  }
  const double slope = fit_slope(xs, ys);
  const double predicted = std::log(2.0 / 3.0);
  o.require(std::abs(slope - predicted) <= tol::tail_slope_rel * std::abs(predicted),
            "transient slope " + fmt(slope) + " vs " + fmt(predicted));
  return o;
}

Outcome drift() {
  Outcome o;
  const auto h = estimate_drift(free2(), hom(), 1000, 10000, 20240601);
  o.require(h.exact && *h.exact == 0.0, "hom exact 0");
  o.require(std::abs(h.value) <= tol::mc_stderr * h.stderr_, "hom MC " + fmt(h.value) + " +- " + fmt(h.stderr_));
  const auto l = exact_drift(window_lift(free2().automaton, wl12()), free2());
  o.require(l.exact && *l.exact == Rational(3, 2), "weighted length 3/2");
  const auto w = estimate_drift(free2(), wordlen(), 1000, 1000, 3);
  o.require(w.exact && *w.exact == 1.0 && w.value == 1.0 && w.spread == 0.0, "word length 1, spread 0");
  return o;
}

Outcome clt_rate() {
  Outcome o;
  const auto p = window_lift(free2().automaton, hom());
  std::vector<std::pair<int, double>> pts;
  for (int n : {25, 100, 400}) pts.emplace_back(n, ks_distance(exact_distribution(p, free2(), n), 0.0, 1.0));
  o.require(pts[0].second >= pts[1].second && pts[1].second >= pts[2].second,
            "KS " + fmt(pts[0].second) + ", " + fmt(pts[1].second) + ", " + fmt(pts[2].second));
  o.require(pts[2].second <= tol::ks_n400, "KS(400) <= 0.06");
  const double slope = rate_fit(pts).slope;
  o.require(slope <= tol::ks_slope, "slope " + fmt(slope));
  return o;
}

Outcome variance() {
  Outcome o;
  const double hom_oracle = oracle::covariance_series(2, {1, -1, 0, 0});
  const double wl_oracle = oracle::covariance_series(2, {1, 1, 2, 2});
  const double h = estimate_variance(exact_distribution(window_lift(free2().automaton, hom()), free2(), 400), 0.0);
  const double w = estimate_variance(exact_distribution(window_lift(free2().automaton, wl12()), free2(), 400), 1.5);
  o.require(std::abs(h - hom_oracle) <= tol::variance_rel * hom_oracle, "hom " + fmt(h) + " vs " + fmt(hom_oracle));
  o.require(std::abs(w - wl_oracle) <= tol::variance_rel * wl_oracle, "weighted " + fmt(w) + " vs " + fmt(wl_oracle));
  return o;
}

Outcome degeneracy() {
  Outcome o;
  struct Case {
    std::string name;
    Observable obs;
    bool degenerate;
  };
  const std::vector<Case> cases{{"word length", wordlen(), true},
                                {"hom", hom(), false},
                                {"brooks ab", make_brooks(f2, f2.alphabet().parse("ab")), false}};
  for (const auto& c : cases) {
    const auto p = window_lift(free2().automaton, c.obs);
    const double lambda = exact_drift(p, free2()).value;
    const auto v = degeneracy_witness(p, free2(), lambda);
    const double var = estimate_variance(exact_distribution(p, free2(), 200), lambda);
    bool ok = v.degenerate == c.degenerate;
    if (c.degenerate) ok = ok && v.max_cycle_sum == 0.0 && var <= tol::degenerate_var;
    else ok = ok && !v.cycle.empty() && v.period_sum != 0.0 && var >= tol::nondegenerate_var;
    std::string cyc;
    for (const auto& x : v.cycle) cyc += x;
    o.require(ok, c.name + (c.degenerate ? "" : " cycle " + cyc + " sum " + fmt(v.period_sum)) + " var " + fmt(var));
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto p = window_lift(free2().automaton, hom());
  const auto exact = exact_distribution(p, free2(), 12);
  const auto s = sample_observable(free2(), hom(), {12}, 1000000, 424242);
  const double tv = total_variation(s.values, exact);
  o.require(tv <= tol::tv, "TV " + fmt(tv));
  return o;
}

Outcome schottky() {
  Outcome o;
  const auto obs = default_schottky();
  const auto small = sample_observable(free2(), obs, {400}, 10000, 101);
  const auto large = sample_observable(free2(), obs, {400}, 100000, 202);
  const auto ds = drift_from_samples(small.values, 400);
  const auto dl = drift_from_samples(large.values, 400);
  o.require(dl.value > 0.0, "Lambda " + fmt(dl.value));
  const double gap = std::abs(ds.value - dl.value);
  const double allowed = tol::mc_stderr * std::hypot(ds.stderr_, dl.stderr_);
  o.require(gap <= allowed, "10^4 vs 10^5 gap " + fmt(gap) + " <= " + fmt(allowed));
  const double sigma2 = estimate_variance(large.values, 400, dl.value);
  const double ks = ks_distance(large.values, 400, dl.value, sigma2);
  o.require(ks <= tol::schottky_ks, "KS " + fmt(ks) + " (sigma2 " + fmt(sigma2) + ")");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / "psclt_acceptance_determinism";
  fs::remove_all(root);
  const std::string cli = PSCLT_CLI_PATH;
  const std::string config = std::string(PSCLT_FIXTURES_DIR) + "/weighted_length_f2.json";
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const auto dir = root / ("run" + std::to_string(i));
    const std::string cmd = "\"" + cli + "\" run --check --config \"" + config + "\" --out \"" + dir.string() + "\" 2>/dev/null";
    const int code = std::system(cmd.c_str());
    o.require(code == 0, "run " + std::to_string(i) + " exit 0");
    outputs[i] = slurp(dir / "check.json") + slurp(dir / "report.json");
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".csv") outputs[i] += slurp(e.path());
  }
  o.require(!outputs[0].empty() && outputs[0] == outputs[1], "byte-identical outputs");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"coding correctness", coding},
      {"spectrum and component disjointness", spectrum},
      {"cylinder measure calculus", measure_calculus},
      {"pushforward coefficients and Cesaro convergence", pushforward_and_cesaro},
      {"truncation tail", truncation},
      {"drift (law of large numbers)", drift},
      {"Gaussian limit with rate", clt_rate},
      {"variance oracles", variance},
      {"degeneracy dichotomy", degeneracy},
      {"Monte Carlo vs exact DP", oracle_equivalence},
      {"Schottky displacement", schottky},
      {"determinism of run --check", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
