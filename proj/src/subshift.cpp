#include "psclt/subshift.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "psclt/error.hpp"

namespace psclt {

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<std::int64_t>>& rows) : n(rows.size()) {
  a.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw Error(ErrorCode::InvalidArgument, "transition matrix must be square");
    for (auto x : r) {
      if (x < 0) throw Error(ErrorCode::InvalidArgument, "transition matrix must be nonnegative");
      a.push_back(x);
    }
  }
  vertex.resize(n);
  std::iota(vertex.begin(), vertex.end(), 0);
}

std::int64_t TransitionMatrix::row_sum(std::size_t i) const {
  return std::accumulate(a.begin() + static_cast<std::ptrdiff_t>(i * n),
                         a.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), std::int64_t{0});
}

RationalMatrix TransitionMatrix::to_rational() const {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n * n; ++i) m.a[i] = static_cast<long>(a[i]);
  return m;
}

TransitionMatrix transition_matrix(const MarkovAutomaton& m, TransitionMatrix::Variant variant) {
  if (variant == TransitionMatrix::Variant::full && !m.augmented())
    throw Error(ErrorCode::InvalidArgument, "the full transition matrix needs an augmented automaton");
  TransitionMatrix t;
  t.variant = variant;
  std::vector<int> index(m.size(), -1);
  for (std::size_t v = 0; v < m.size(); ++v) {
    if (variant == TransitionMatrix::Variant::prime && static_cast<int>(v) == m.zero()) continue;
    index[v] = static_cast<int>(t.vertex.size());
    t.vertex.push_back(static_cast<int>(v));
  }
  t.n = t.vertex.size();
  t.a.assign(t.n * t.n, 0);
  for (const auto& e : m.edges()) {
    const int i = index[static_cast<std::size_t>(e.from)];
    const int j = index[static_cast<std::size_t>(e.to)];
    if (i < 0 || j < 0) continue;
    t.a[static_cast<std::size_t>(i) * t.n + static_cast<std::size_t>(j)] = 1;
  }
  return t;
}

double component_radius(const TransitionMatrix& t, const std::vector<int>& vertices) {
  const std::size_t k = vertices.size();
  // Collatz-Wielandt bounds for B + I, which is primitive when B is irreducible.
  std::vector<double> x(k, 1.0), y(k);
  double lo = 0.0, hi = 0.0;
  for (int it = 0; it < 1000000; ++it) {
    for (std::size_t i = 0; i < k; ++i) {
      double s = x[i];
      for (std::size_t j = 0; j < k; ++j)
        s += static_cast<double>(t(static_cast<std::size_t>(vertices[i]), static_cast<std::size_t>(vertices[j]))) * x[j];
      y[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      lo = std::min(lo, y[i] / x[i]);
      hi = std::max(hi, y[i] / x[i]);
    }
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 0; i < k; ++i) x[i] = y[i] / top;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi) - 1.0;
}

namespace {

std::vector<std::vector<int>> tarjan(const TransitionMatrix& t) {
  const int n = static_cast<int>(t.n);
  std::vector<int> index(t.n, -1), low(t.n, 0), stack;
  std::vector<bool> on_stack(t.n, false);
  std::vector<std::vector<int>> out;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
    stack.push_back(v);
    on_stack[static_cast<std::size_t>(v)] = true;
    for (int w = 0; w < n; ++w) {
      if (t(static_cast<std::size_t>(v), static_cast<std::size_t>(w)) == 0) continue;
      if (index[static_cast<std::size_t>(w)] < 0) {
        visit(w);
        low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], low[static_cast<std::size_t>(w)]);
      } else if (on_stack[static_cast<std::size_t>(w)]) {
        low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
      }
    }
    if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
      std::vector<int> comp;
      int w = -1;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[static_cast<std::size_t>(v)] < 0) visit(v);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace

GrowthRate growth_rate(const TransitionMatrix& t) {
  if (std::all_of(t.a.begin(), t.a.end(), [](auto x) { return x == 0; }))
    throw Error(ErrorCode::InvalidArgument, "growth rate of the zero matrix");
  GrowthRate g;
  for (const auto& comp : tarjan(t)) g.lambda = std::max(g.lambda, component_radius(t, comp));
  // Eigen-residual of a lazy power iterate.
  std::vector<double> x(t.n, 1.0);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> y(t.n, 0.0);
    for (std::size_t i = 0; i < t.n; ++i) {
      y[i] = x[i];
      for (std::size_t j = 0; j < t.n; ++j) y[i] += static_cast<double>(t(i, j)) * x[j];
    }
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 0; i < t.n; ++i) x[i] = y[i] / top;
  }
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < t.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < t.n; ++j) s += static_cast<double>(t(i, j)) * x[j];
    worst = std::max(worst, std::abs(s - g.lambda * x[i]));
    scale = std::max(scale, x[i]);
  }
  g.residual = worst / (scale * std::max(g.lambda, 1.0));
  if (g.lambda <= 1.0 + 1e-8) {
    g.elementary = true;
    g.warnings.push_back("NotNonElementary: growth rate " + std::to_string(g.lambda) + " <= 1");
  }
  return g;
}

std::vector<int> ComponentDecomposition::maximal() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i].maximal) out.push_back(static_cast<int>(i));
  return out;
}

ComponentDecomposition decompose(const TransitionMatrix& t, double lambda, bool group_coding) {
  ComponentDecomposition d;
  d.component_of.assign(t.n, -1);
  for (auto& verts : tarjan(t)) {
    Component c;
    c.radius = component_radius(t, verts);
    c.maximal = c.radius >= lambda * (1.0 - 1e-8);
    for (int v : verts) d.component_of[static_cast<std::size_t>(v)] = static_cast<int>(d.components.size());
    c.vertices = std::move(verts);
    d.components.push_back(std::move(c));
  }
  const std::size_t m = d.components.size();
  std::vector<std::vector<bool>> edge(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < t.n; ++i)
    for (std::size_t j = 0; j < t.n; ++j) {
      const auto ci = static_cast<std::size_t>(d.component_of[i]);
      const auto cj = static_cast<std::size_t>(d.component_of[j]);
      if (t(i, j) != 0 && ci != cj) edge[ci][cj] = true;
    }
  d.reaches.assign(m, std::vector<bool>(m, false));
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<std::size_t> todo{s};
    std::vector<bool> seen(m, false);
    seen[s] = true;
    while (!todo.empty()) {
      const auto c = todo.back();
      todo.pop_back();
      for (std::size_t nxt = 0; nxt < m; ++nxt)
        if (edge[c][nxt] && !seen[nxt]) {
          seen[nxt] = true;
          d.reaches[s][nxt] = true;
          todo.push_back(nxt);
        }
    }
  }
  if (group_coding) {
    for (int i : d.maximal())
      for (int j : d.maximal())
        if (i != j && d.reaches[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
          throw Error(ErrorCode::GroupCodingViolation,
                      "maximal components " + std::to_string(i) + " and " + std::to_string(j) + " are connected");
  }
  return d;
}

namespace {

std::vector<double> apply(const TransitionMatrix& t, const std::vector<double>& x, bool transpose) {
  std::vector<double> y(t.n, 0.0);
  for (std::size_t i = 0; i < t.n; ++i)
    for (std::size_t j = 0; j < t.n; ++j) {
      const auto aij = t(i, j);
      if (aij == 0) continue;
      if (transpose) y[j] += static_cast<double>(aij) * x[i];
      else y[i] += static_cast<double>(aij) * x[j];
    }
  return y;
}

double eigen_residual(const TransitionMatrix& t, const std::vector<double>& x, double lambda, bool transpose) {
  const auto y = apply(t, x, transpose);
  double r = 0.0;
  for (std::size_t i = 0; i < t.n; ++i) r = std::max(r, std::abs(y[i] - lambda * x[i]));
  return r;
}

// Lazy power iteration: ((A + I)/(lambda + 1))^k v converges to the Cesaro limit
// of A^k v / lambda^k, since every other eigenvalue moves strictly inside.
std::vector<double> lazy_limit(const TransitionMatrix& t, std::vector<double> x, double lambda, bool transpose,
                               int& steps) {
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (steps = 0; steps < 2000000; ++steps) {
    auto y = apply(t, x, transpose);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < t.n; ++i) {
      y[i] = (y[i] + x[i]) / (lambda + 1.0);
      diff = std::max(diff, std::abs(y[i] - x[i]));
      scale = std::max(scale, std::abs(y[i]));
    }
    x = std::move(y);
    if (diff <= 1e-16 * scale) break;
    if (diff < best) {
      best = diff;
      stale = 0;
    } else if (++stale > 200) {
      break;
    }
  }
  return x;
}

std::vector<bool> reach_closure(const TransitionMatrix& t, std::vector<bool> seed, bool backwards) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < t.n; ++i)
    if (seed[i]) todo.push_back(i);
  while (!todo.empty()) {
    const auto v = todo.back();
    todo.pop_back();
    for (std::size_t w = 0; w < t.n; ++w) {
      const bool linked = backwards ? t(w, v) != 0 : t(v, w) != 0;
      if (linked && !seed[w]) {
        seed[w] = true;
        todo.push_back(w);
      }
    }
  }
  return seed;
}

}  // namespace

CesaroResult cesaro_project(const TransitionMatrix& t, const std::vector<double>& v, double lambda, int n,
                            bool transpose) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cesaro_project needs n >= 1");
  if (v.size() != t.n) throw Error(ErrorCode::InvalidArgument, "vector size mismatch");
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  CesaroResult out;
  out.value = v;
  std::vector<double> term = v;
  for (int k = 1; k <= n; ++k) {
    term = apply(t, term, transpose);
    for (auto& x : term) x /= lambda;
    for (std::size_t i = 0; i < t.n; ++i) out.value[i] += term[i];
  }
  for (auto& x : out.value) x /= static_cast<double>(n + 1);
  out.residual = eigen_residual(t, out.value, lambda, transpose);
  return out;
}

SpectralData spectral_data(const TransitionMatrix& t, const ComponentDecomposition& c, double lambda, int start,
                           Arithmetic arithmetic) {
  SpectralData s;
  s.lambda = lambda;
  const auto st = static_cast<std::size_t>(start);
  if (arithmetic == Arithmetic::rational) {
    const auto q = rational_approximation(lambda);
    if (!q) throw Error(ErrorCode::DegenerateSpectrum, "growth rate is not rational");
    const RationalMatrix a = t.to_rational();
    ExactSpectral e;
    e.lambda = *q;
    e.p_one = cesaro_limit_exact(a, e.lambda, std::vector<Rational>(t.n, Rational(1)));
    std::vector<Rational> vstar(t.n);
    vstar[st] = 1;
    e.r_vstar = cesaro_limit_exact(a, e.lambda, vstar, true);
    s.lambda = to_double(e.lambda);
    for (const auto& x : e.p_one) s.p_one.push_back(to_double(x));
    for (const auto& x : e.r_vstar) s.r_vstar.push_back(to_double(x));
    s.exact = std::move(e);
  } else {
    int steps_p = 0, steps_r = 0;
    s.p_one = lazy_limit(t, std::vector<double>(t.n, 1.0), lambda, false, steps_p);
    std::vector<double> vstar(t.n, 0.0);
    vstar[st] = 1.0;
    s.r_vstar = lazy_limit(t, vstar, lambda, true, steps_r);
    s.cesaro_steps = std::max(steps_p, steps_r);
    // Exact zeros where no path reaches (resp. leaves) a maximal component.
    std::vector<bool> in_max(t.n, false);
    for (std::size_t v = 0; v < t.n; ++v) in_max[v] = c.in_maximal(static_cast<int>(v));
    const auto feeds = reach_closure(t, in_max, true);
    std::vector<bool> from_start(t.n, false);
    from_start[st] = true;
    from_start = reach_closure(t, from_start, false);
    std::vector<bool> live_max(t.n, false);
    for (std::size_t v = 0; v < t.n; ++v) live_max[v] = in_max[v] && from_start[v];
    const auto fed = reach_closure(t, live_max, false);
    for (std::size_t v = 0; v < t.n; ++v) {
      if (!feeds[v]) s.p_one[v] = 0.0;
      if (!fed[v]) s.r_vstar[v] = 0.0;
    }
  }
  const double pn = *std::max_element(s.p_one.begin(), s.p_one.end());
  const double rn = *std::max_element(s.r_vstar.begin(), s.r_vstar.end());
  s.residual = std::max(eigen_residual(t, s.p_one, s.lambda, false) / std::max(pn, 1e-300),
                        eigen_residual(t, s.r_vstar, s.lambda, true) / std::max(rn, 1e-300));
  if (arithmetic == Arithmetic::floating && s.residual > 1e-8)
    throw Error(ErrorCode::DegenerateSpectrum, "Cesaro projection did not converge (residual " +
                                                   std::to_string(s.residual) + ")");
  return s;
}

MarkovMeasure build_markov_measure(const TransitionMatrix& t, const SpectralData& s, const ComponentDecomposition& c) {
  MarkovMeasure m;
  m.n = t.n;
  m.N.assign(t.n * t.n, 0.0);
  const double pmax = *std::max_element(s.p_one.begin(), s.p_one.end());
  for (std::size_t i = 0; i < t.n; ++i) {
    if (s.p_one[i] <= 1e-13 * pmax) {
      m.N[i * t.n + i] = 1.0;
      continue;
    }
    for (std::size_t j = 0; j < t.n; ++j)
      m.N[i * t.n + j] = static_cast<double>(t(i, j)) * s.p_one[j] / (s.lambda * s.p_one[i]);
  }
  m.rho.resize(t.n);
  double total = 0.0;
  for (std::size_t i = 0; i < t.n; ++i) total += m.rho[i] = s.p_one[i] * s.r_vstar[i];
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "vertex distribution has zero mass");
  for (auto& x : m.rho) x /= total;
  for (int ci : c.maximal()) {
    double a = 0.0;
    for (int v : c.components[static_cast<std::size_t>(ci)].vertices) a += m.rho[static_cast<std::size_t>(v)];
    m.alpha.push_back(a);
  }

  if (s.exact) {
    const auto& e = *s.exact;
    ExactMeasure x;
    x.N = RationalMatrix(t.n, t.n);
    for (std::size_t i = 0; i < t.n; ++i) {
      if (e.p_one[i] == 0) {
        x.N(i, i) = 1;
        continue;
      }
      for (std::size_t j = 0; j < t.n; ++j)
        if (t(i, j) != 0) x.N(i, j) = Rational(static_cast<long>(t(i, j))) * e.p_one[j] / (e.lambda * e.p_one[i]);
    }
    Rational sum = 0;
    x.rho.resize(t.n);
    for (std::size_t i = 0; i < t.n; ++i) sum += x.rho[i] = e.p_one[i] * e.r_vstar[i];
    if (sum == 0) throw Error(ErrorCode::DegenerateSpectrum, "vertex distribution has zero mass");
    for (auto& r : x.rho) r /= sum;
    for (int ci : c.maximal()) {
      Rational a = 0;
      for (int v : c.components[static_cast<std::size_t>(ci)].vertices) a += x.rho[static_cast<std::size_t>(v)];
      x.alpha.push_back(a);
    }
    for (std::size_t i = 0; i < t.n; ++i) {
      m.rho[i] = to_double(x.rho[i]);
      for (std::size_t j = 0; j < t.n; ++j) m.N[i * t.n + j] = to_double(x.N(i, j));
    }
    for (std::size_t i = 0; i < x.alpha.size(); ++i) m.alpha[i] = to_double(x.alpha[i]);
    m.exact = std::move(x);
  }
  return m;
}

CodingModel analyze(const MarkovAutomaton& m, Arithmetic arithmetic, bool group_coding) {
  CodingModel model;
  model.automaton = m.augmented() ? m : augment(m);
  model.a = transition_matrix(model.automaton, TransitionMatrix::Variant::full);
  model.a_prime = transition_matrix(model.automaton, TransitionMatrix::Variant::prime);
  model.growth = growth_rate(model.a);
  model.components = decompose(model.a, model.growth.lambda, group_coding);
  if (arithmetic == Arithmetic::rational && !rational_approximation(model.growth.lambda)) {
    model.growth.warnings.push_back("growth rate is irrational; using floating point");
    arithmetic = Arithmetic::floating;
  }
  model.spectrum = spectral_data(model.a, model.components, model.growth.lambda, model.start(), arithmetic);
  model.measure = build_markov_measure(model.a, model.spectrum, model.components);
  return model;
}

nlohmann::json spectrum_to_json(const CodingModel& model) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : model.components.components)
    comps.push_back({{"vertices", c.vertices}, {"radius", c.radius}, {"maximal", c.maximal}});
  return {{"lambda", model.spectrum.lambda},
          {"exact", model.exact()},
          {"components", comps},
          {"p_one", model.spectrum.p_one},
          {"r_vstar", model.spectrum.r_vstar},
          {"rho", model.measure.rho},
          {"alpha", model.measure.alpha},
          {"residual", model.spectrum.residual},
          {"warnings", model.growth.warnings}};
}

}  // namespace psclt
