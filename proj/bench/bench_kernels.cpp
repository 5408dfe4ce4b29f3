#include <benchmark/benchmark.h>

#include "psclt/kernels.hpp"

using namespace psclt;

namespace {

const GroupSpec f2 = GroupSpec::free_group(2);

const CodingModel& model() {
  static const CodingModel m = analyze(build_free_automaton(2), Arithmetic::rational);
  return m;
}

struct DpSetup {
  EdgePotential potential;
  LatticeChain chain;
  std::size_t width;
  std::vector<double> in, out;

  explicit DpSetup(int n)
      : potential(window_lift(model().automaton, make_brooks(f2, f2.alphabet().parse("aab")))),
        chain(lattice_chain(potential, model().measure)),
        width(static_cast<std::size_t>(n * (chain.max_units - chain.min_units) + 1)),
        in(chain.states * width, 0.0),
        out(chain.states * width, 0.0) {
    // Spread mass over the grid so every cell does work.
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = 1.0 / static_cast<double>(in.size());
  }
};

void BM_DpStepSerial(benchmark::State& state) {
  DpSetup s(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    // The serial push throws when mass leaves the grid; keep the edge cells empty.
    for (std::size_t u = 0; u < s.chain.states; ++u) {
      const auto span = static_cast<std::size_t>(s.chain.max_units - s.chain.min_units);
      for (std::size_t c = s.width - span; c < s.width; ++c) s.in[u * s.width + c] = 0.0;
    }
    dp_step_serial(s.chain, s.in, s.out, s.width, s.chain.min_units);
    benchmark::DoNotOptimize(s.out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.in.size()));
}

void BM_DpStepParallel(benchmark::State& state) {
  DpSetup s(static_cast<int>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    dp_step_parallel(s.chain, s.in, s.out, s.width, s.chain.min_units, workers);
    benchmark::DoNotOptimize(s.out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.in.size()));
}

void BM_RaysSerial(benchmark::State& state) {
  const ChainSampler sampler(model().measure);
  const auto obs = default_schottky();
  const RayProgram prog{&model(), &sampler, nullptr, &obs, {400}, 1};
  for (auto _ : state) benchmark::DoNotOptimize(sample_values_serial(prog, static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RaysParallel(benchmark::State& state) {
  const ChainSampler sampler(model().measure);
  const auto obs = default_schottky();
  const RayProgram prog{&model(), &sampler, nullptr, &obs, {400}, 1};
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_values_parallel(prog, static_cast<std::size_t>(state.range(0)), workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DpStepSerial)->Arg(400)->Arg(1600);
BENCHMARK(BM_DpStepParallel)->Args({400, 1})->Args({400, 4})->Args({1600, 1})->Args({1600, 4});
BENCHMARK(BM_RaysSerial)->Arg(2000);
BENCHMARK(BM_RaysParallel)->Args({2000, 1})->Args({2000, 4});

BENCHMARK_MAIN();
