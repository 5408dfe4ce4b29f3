#include <gtest/gtest.h>

#include <cmath>

#include "psclt/error.hpp"
#include "psclt/kernels.hpp"
#include "psclt/statistics.hpp"

using namespace psclt;

namespace {

const GroupSpec f2 = GroupSpec::free_group(2);

const CodingModel& model() {
  static const CodingModel m = analyze(build_free_automaton(2), Arithmetic::rational);
  return m;
}

}  // namespace

TEST(LatticeChain, ReachableSupport) {
  const auto p = window_lift(model().automaton, make_brooks(f2, f2.alphabet().parse("ab")));
  const auto c = lattice_chain(p, model().measure);
  EXPECT_EQ(c.states, p.size());
  EXPECT_EQ(c.min_units, -1);
  EXPECT_EQ(c.max_units, 1);
  for (std::size_t u = 1; u < c.states; ++u) {
    double s = 0.0;
    for (const auto& a : c.out[u]) s += a.prob;
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(DpStep, ParallelMatchesSerial) {
  for (const char* w : {"ab", "aab"}) {
    const auto p = window_lift(model().automaton, make_brooks(f2, f2.alphabet().parse(w)));
    const auto chain = lattice_chain(p, model().measure);
    const int n = 60;
    const std::size_t width = static_cast<std::size_t>(n * (chain.max_units - chain.min_units) + 1);
    std::vector<double> a(chain.states * width, 0.0), b = a, sa = a, sb = a;
    a[0] = b[0] = 1.0;
    for (int k = 0; k < n; ++k) {
      dp_step_serial(chain, a, sa, width, chain.min_units);
      dp_step_parallel(chain, b, sb, width, chain.min_units, 4);
      std::swap(a, sa);
      std::swap(b, sb);
    }
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-15);
  }
}

TEST(DpStep, ParallelIsDeterministicAcrossWorkers) {
  const auto p = window_lift(model().automaton, make_homomorphism(f2, {{"a", 1.0}, {"b", 0.0}}));
  DpOptions one, four;
  one.parallel = four.parallel = true;
  one.workers = 1;
  four.workers = 4;
  const auto d1 = exact_distribution(p, model(), 200, one);
  const auto d4 = exact_distribution(p, model(), 200, four);
  EXPECT_EQ(d1.probabilities, d4.probabilities);
}

TEST(DpStep, NarrowGridThrows) {
  const auto p = window_lift(model().automaton, make_homomorphism(f2, {{"a", 1.0}, {"b", 0.0}}));
  const auto chain = lattice_chain(p, model().measure);
  std::vector<double> in(chain.states, 0.0), out(chain.states, 0.0);
  in[0] = 1.0;
  EXPECT_THROW(dp_step_serial(chain, in, out, 1, chain.min_units), Error);
}

TEST(SampleValues, ParallelBitwiseEqualsSerial) {
  const ChainSampler sampler(model().measure);
  const auto hom = make_homomorphism(f2, {{"a", 1.0}, {"b", 0.0}});
  const auto p = window_lift(model().automaton, hom);
  const auto schottky = default_schottky();
  RayProgram lifted{&model(), &sampler, &p, nullptr, {5, 50, 200}, 123};
  RayProgram displaced{&model(), &sampler, nullptr, &schottky, {5, 50, 200}, 123};
  for (const auto& prog : {lifted, displaced}) {
    const auto serial = sample_values_serial(prog, 3000);
    for (int workers : {1, 2, 4}) EXPECT_EQ(sample_values_parallel(prog, 3000, workers), serial);
  }
}

TEST(SampleValues, ProgramValidation) {
  const ChainSampler sampler(model().measure);
  RayProgram bad{&model(), &sampler, nullptr, nullptr, {1}, 0};
  EXPECT_THROW(sample_values_serial(bad, 1), Error);
  const auto schottky = default_schottky();
  RayProgram unsorted{&model(), &sampler, nullptr, &schottky, {5, 2}, 0};
  EXPECT_THROW(sample_values_serial(unsorted, 1), Error);
}

TEST(SampleValues, ValuesMatchDirectEvaluation) {
  // Replays each ray through the sampler and evaluates the decoded word directly.
  const ChainSampler sampler(model().measure);
  const auto brooks = make_brooks(f2, f2.alphabet().parse("ab"));
  const auto p = window_lift(model().automaton, brooks);
  const RayProgram prog{&model(), &sampler, &p, nullptr, {30}, 77};
  const auto values = sample_values_serial(prog, 50);
  for (std::size_t r = 0; r < 50; ++r) {
    auto rng = ray_stream(77, r);
    Path path{0};
    for (int k = 0; k < 30; ++k) path.push_back(sampler.step(path.back(), rng));
    EXPECT_DOUBLE_EQ(values[r], evaluate(brooks, decode(model().automaton, path)));
  }
}
