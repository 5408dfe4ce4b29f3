#include "psclt/kernels.hpp"

#include <algorithm>
#include <optional>

#include "psclt/error.hpp"

namespace psclt {

LatticeChain lattice_chain(const EdgePotential& potential, const MarkovMeasure& measure) {
  LatticeChain c;
  c.states = potential.size();
  c.out.resize(c.states);
  c.in.resize(c.states);
  std::vector<bool> reached(c.states, false);
  std::vector<int> todo{potential.start()};
  reached[static_cast<std::size_t>(potential.start())] = true;
  bool first = true;
  while (!todo.empty()) {
    const int u = todo.back();
    todo.pop_back();
    const auto bu = static_cast<std::size_t>(potential.base[static_cast<std::size_t>(u)]);
    for (const auto& e : potential.out[static_cast<std::size_t>(u)]) {
      const double prob = measure(bu, static_cast<std::size_t>(potential.base[static_cast<std::size_t>(e.to)]));
      if (prob <= 0.0) continue;
      const LatticeChain::Arc arc{u, e.to, prob, e.units};
      c.out[static_cast<std::size_t>(u)].push_back(arc);
      c.in[static_cast<std::size_t>(e.to)].push_back(arc);
      c.min_units = first ? e.units : std::min(c.min_units, e.units);
      c.max_units = first ? e.units : std::max(c.max_units, e.units);
      first = false;
      if (!reached[static_cast<std::size_t>(e.to)]) {
        reached[static_cast<std::size_t>(e.to)] = true;
        todo.push_back(e.to);
      }
    }
  }
  for (auto& arcs : c.in)
    std::sort(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) { return a.from < b.from; });
  return c;
}

void dp_step_serial(const LatticeChain& chain, const std::vector<double>& in, std::vector<double>& out,
                    std::size_t width, std::int64_t shift) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t u = 0; u < chain.states; ++u) {
    const double* row = in.data() + u * width;
    for (std::size_t c = 0; c < width; ++c) {
      const double mass = row[c];
      if (mass == 0.0) continue;
      for (const auto& arc : chain.out[u]) {
        const auto target = static_cast<std::int64_t>(c) + arc.units - shift;
        if (target < 0 || target >= static_cast<std::int64_t>(width))
          throw Error(ErrorCode::BudgetExceeded, "lattice grid too narrow");
        out[static_cast<std::size_t>(arc.to) * width + static_cast<std::size_t>(target)] += mass * arc.prob;
      }
    }
  }
}

void dp_step_parallel(const LatticeChain& chain, const std::vector<double>& in, std::vector<double>& out,
                      std::size_t width, std::int64_t shift, int workers) {
  const auto states = static_cast<std::int64_t>(chain.states);
  const auto w = static_cast<std::int64_t>(width);
#pragma omp parallel for collapse(2) schedule(static) num_threads(std::max(1, workers))
  for (std::int64_t v = 0; v < states; ++v) {
    for (std::int64_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (const auto& arc : chain.in[static_cast<std::size_t>(v)]) {
        const std::int64_t source = c - (arc.units - shift);
        if (source < 0 || source >= w) continue;
        acc += in[static_cast<std::size_t>(arc.from) * width + static_cast<std::size_t>(source)] * arc.prob;
      }
      out[static_cast<std::size_t>(v) * width + static_cast<std::size_t>(c)] = acc;
    }
  }
}

namespace {

struct RayTables {
  std::size_t n_base = 0;
  std::vector<int> lifted_next;        // lifted state x base vertex -> lifted state
  std::vector<std::int64_t> lifted_units;
  std::vector<Letter> label;           // base x base -> letter
};

RayTables ray_tables(const RayProgram& p) {
  RayTables t;
  const auto& m = p.model->automaton;
  t.n_base = m.size();
  t.label.assign(t.n_base * t.n_base, kIdentityLabel);
  for (const auto& e : m.edges()) t.label[static_cast<std::size_t>(e.from) * t.n_base + static_cast<std::size_t>(e.to)] = e.label;
  if (p.potential) {
    t.lifted_next.assign(p.potential->size() * t.n_base, -1);
    t.lifted_units.assign(p.potential->size() * t.n_base, 0);
    for (std::size_t u = 0; u < p.potential->size(); ++u)
      for (const auto& e : p.potential->out[u]) {
        const std::size_t at = u * t.n_base + static_cast<std::size_t>(p.potential->base[static_cast<std::size_t>(e.to)]);
        t.lifted_next[at] = e.to;
        t.lifted_units[at] = e.units;
      }
  }
  return t;
}

void run_ray(const RayProgram& p, const RayTables& t, std::size_t index, double* out) {
  auto rng = ray_stream(p.seed, index);
  int v = p.model->start();
  int lifted = p.potential ? p.potential->start() : 0;
  std::int64_t units = 0;
  std::optional<DisplacementAccumulator> acc;
  if (p.displacement) acc.emplace(*p.displacement);
  std::size_t next_checkpoint = 0;
  const int last = p.checkpoints.empty() ? 0 : p.checkpoints.back();
  for (int step = 1; step <= last; ++step) {
    const int w = p.sampler->step(v, rng);
    if (p.potential) {
      const std::size_t at = static_cast<std::size_t>(lifted) * t.n_base + static_cast<std::size_t>(w);
      units += t.lifted_units[at];
      lifted = t.lifted_next[at];
    }
    if (acc) acc->push(t.label[static_cast<std::size_t>(v) * t.n_base + static_cast<std::size_t>(w)]);
    v = w;
    while (next_checkpoint < p.checkpoints.size() && p.checkpoints[next_checkpoint] == step) {
      out[next_checkpoint++] = acc ? acc->value() : static_cast<double>(units) * p.potential->quantum;
    }
  }
}

void check_program(const RayProgram& p) {
  if (!p.model || !p.sampler || (!p.potential && !p.displacement))
    throw Error(ErrorCode::InvalidArgument, "incomplete ray program");
  if (!std::is_sorted(p.checkpoints.begin(), p.checkpoints.end()) ||
      (!p.checkpoints.empty() && p.checkpoints.front() < 1))
    throw Error(ErrorCode::InvalidArgument, "checkpoints must be increasing and positive");
}

}  // namespace

std::vector<double> sample_values_serial(const RayProgram& program, std::size_t rays) {
  check_program(program);
  const RayTables tables = ray_tables(program);
  const std::size_t k = program.checkpoints.size();
  std::vector<double> values(rays * k, 0.0);
  for (std::size_t r = 0; r < rays; ++r) run_ray(program, tables, r, values.data() + r * k);
  return values;
}

std::vector<double> sample_values_parallel(const RayProgram& program, std::size_t rays, int workers) {
  check_program(program);
  const RayTables tables = ray_tables(program);
  const std::size_t k = program.checkpoints.size();
  std::vector<double> values(rays * k, 0.0);
  const auto n = static_cast<std::int64_t>(rays);
#pragma omp parallel for schedule(static) num_threads(std::max(1, workers))
  for (std::int64_t r = 0; r < n; ++r)
    run_ray(program, tables, static_cast<std::size_t>(r), values.data() + static_cast<std::size_t>(r) * k);
  return values;
}

}  // namespace psclt
