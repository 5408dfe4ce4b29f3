#pragma once

#include <cstdint>
#include <vector>

#include "psclt/measures.hpp"
#include "psclt/observables.hpp"

namespace psclt {

/// Lifted chain with lattice increments: transition u -> to with probability prob adds `units`.
struct LatticeChain {
  struct Arc {
    int from = 0;
    int to = 0;
    double prob = 0.0;
    std::int64_t units = 0;
  };
  std::size_t states = 0;
  std::vector<std::vector<Arc>> out;
  std::vector<std::vector<Arc>> in;
  std::int64_t min_units = 0;
  std::int64_t max_units = 0;
};

/// Keeps arcs with positive probability under N, among states reachable from the start.
LatticeChain lattice_chain(const EdgePotential& potential, const MarkovMeasure& measure);

/// One DP step on a states x width grid (row-major); column c holds lattice value c + offset.
/// Mass at column c moves to column c + units - shift. Serial push reference.
void dp_step_serial(const LatticeChain& chain, const std::vector<double>& in, std::vector<double>& out,
                    std::size_t width, std::int64_t shift);
/// Same step as an OpenMP pull over target cells.
void dp_step_parallel(const LatticeChain& chain, const std::vector<double>& in, std::vector<double>& out,
                      std::size_t width, std::int64_t shift, int workers);

/// What a Monte Carlo ray accumulates.
struct RayProgram {
  const CodingModel* model = nullptr;
  const ChainSampler* sampler = nullptr;
  const EdgePotential* potential = nullptr;  // window-local observables
  const Observable* displacement = nullptr;  // Schottky displacement
  std::vector<int> checkpoints;              // increasing step counts
  std::uint64_t seed = 0;
};

/// Observable values at each checkpoint, row-major rays x checkpoints.
std::vector<double> sample_values_serial(const RayProgram& program, std::size_t rays);
std::vector<double> sample_values_parallel(const RayProgram& program, std::size_t rays, int workers);

}  // namespace psclt
