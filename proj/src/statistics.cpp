#include "psclt/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "psclt/error.hpp"

namespace psclt {

double ExactDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) m += probabilities[i] * value(i);
  return m;
}

namespace {

void trim(ExactDistribution& d) {
  std::size_t lo = 0, hi = d.probabilities.size();
  auto zero = [&](std::size_t i) { return d.exact ? (*d.exact)[i] == 0 : d.probabilities[i] == 0.0; };
  while (lo + 1 < hi && zero(lo)) ++lo;
  while (hi > lo + 1 && zero(hi - 1)) --hi;
  d.probabilities = {d.probabilities.begin() + static_cast<std::ptrdiff_t>(lo),
                     d.probabilities.begin() + static_cast<std::ptrdiff_t>(hi)};
  if (d.exact)
    *d.exact = {d.exact->begin() + static_cast<std::ptrdiff_t>(lo), d.exact->begin() + static_cast<std::ptrdiff_t>(hi)};
  d.offset += static_cast<std::int64_t>(lo);
}

}  // namespace

ExactDistribution exact_distribution(const EdgePotential& potential, const CodingModel& model, int n,
                                     const DpOptions& options) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
  const LatticeChain chain = lattice_chain(potential, model.measure);
  const std::int64_t span = chain.max_units - chain.min_units;
  const auto width = static_cast<std::size_t>(static_cast<std::int64_t>(n) * span + 1);
  if (static_cast<double>(chain.states) * static_cast<double>(width) > static_cast<double>(options.budget))
    throw Error(ErrorCode::BudgetExceeded, "lattice DP needs " + std::to_string(chain.states) + " x " +
                                               std::to_string(width) + " cells; bin the observable or lower n");
  ExactDistribution d;
  d.n = n;
  d.quantum = potential.quantum;
  d.offset = static_cast<std::int64_t>(n) * chain.min_units;
  const auto start = static_cast<std::size_t>(potential.start());

  if (options.rational) {
    if (!model.exact()) throw Error(ErrorCode::InvalidArgument, "rational DP needs exact spectral data");
    const auto& N = model.measure.exact->N;
    std::vector<Rational> grid(chain.states * width), next(chain.states * width);
    grid[start * width] = 1;
    for (int k = 0; k < n; ++k) {
      std::fill(next.begin(), next.end(), Rational(0));
      for (std::size_t u = 0; u < chain.states; ++u)
        for (std::size_t c = 0; c < width; ++c) {
          const Rational& mass = grid[u * width + c];
          if (mass == 0) continue;
          for (const auto& arc : chain.out[u]) {
            const Rational& p = N(static_cast<std::size_t>(potential.base[u]),
                                  static_cast<std::size_t>(potential.base[static_cast<std::size_t>(arc.to)]));
            const auto target = static_cast<std::size_t>(static_cast<std::int64_t>(c) + arc.units - chain.min_units);
            next[static_cast<std::size_t>(arc.to) * width + target] += mass * p;
          }
        }
      std::swap(grid, next);
    }
    std::vector<Rational> marginal(width);
    for (std::size_t u = 0; u < chain.states; ++u)
      for (std::size_t c = 0; c < width; ++c) marginal[c] += grid[u * width + c];
    for (const auto& q : marginal) d.probabilities.push_back(to_double(q));
    d.exact = std::move(marginal);
    trim(d);
    return d;
  }

  std::vector<double> grid(chain.states * width, 0.0), next(chain.states * width, 0.0);
  grid[start * width] = 1.0;
  for (int k = 0; k < n; ++k) {
    if (options.parallel) dp_step_parallel(chain, grid, next, width, chain.min_units, options.workers);
    else dp_step_serial(chain, grid, next, width, chain.min_units);
    std::swap(grid, next);
  }
  d.probabilities.assign(width, 0.0);
  for (std::size_t u = 0; u < chain.states; ++u)
    for (std::size_t c = 0; c < width; ++c) d.probabilities[c] += grid[u * width + c];
  trim(d);
  return d;
}

ExactValue exact_drift(const EdgePotential& potential, const CodingModel& model) {
  const LatticeChain chain = lattice_chain(potential, model.measure);
  const auto start = static_cast<std::size_t>(potential.start());
  ExactValue out;
  if (model.exact()) {
    const auto& N = model.measure.exact->N;
    const auto q = rational_approximation(potential.quantum, 1000000, 1e-12);
    if (q) {
      RationalMatrix P(chain.states, chain.states);
      std::vector<Rational> step_mean(chain.states);
      for (std::size_t u = 0; u < chain.states; ++u)
        for (const auto& arc : chain.out[u]) {
          const Rational& p = N(static_cast<std::size_t>(potential.base[u]),
                                static_cast<std::size_t>(potential.base[static_cast<std::size_t>(arc.to)]));
          P(u, static_cast<std::size_t>(arc.to)) += p;
          step_mean[u] += p * Rational(static_cast<long>(arc.units)) * *q;
        }
      // States off the chain's support get a self-loop so that P stays stochastic.
      for (std::size_t u = 0; u < chain.states; ++u)
        if (chain.out[u].empty()) P(u, u) = 1;
      std::vector<Rational> e(chain.states);
      e[start] = 1;
      const auto pi = cesaro_limit_exact(P, Rational(1), e, true);
      Rational lambda = 0;
      for (std::size_t u = 0; u < chain.states; ++u) lambda += pi[u] * step_mean[u];
      out.exact = lambda;
      out.value = to_double(lambda);
      return out;
    }
  }
  std::vector<double> pi(chain.states, 0.0), step_mean(chain.states, 0.0);
  for (std::size_t u = 0; u < chain.states; ++u)
    for (const auto& arc : chain.out[u]) step_mean[u] += arc.prob * static_cast<double>(arc.units) * potential.quantum;
  pi[start] = 1.0;
  for (int it = 0; it < 1000000; ++it) {
    std::vector<double> next(chain.states, 0.0);
    for (std::size_t u = 0; u < chain.states; ++u) {
      next[u] += 0.5 * pi[u];
      if (chain.out[u].empty()) next[u] += 0.5 * pi[u];
      for (const auto& arc : chain.out[u]) next[static_cast<std::size_t>(arc.to)] += 0.5 * pi[u] * arc.prob;
    }
    double diff = 0.0;
    for (std::size_t u = 0; u < chain.states; ++u) diff = std::max(diff, std::abs(next[u] - pi[u]));
    pi = std::move(next);
    if (diff < 1e-16) break;
  }
  for (std::size_t u = 0; u < chain.states; ++u) out.value += pi[u] * step_mean[u];
  return out;
}

std::vector<double> RaySamples::column(std::size_t i) const {
  std::vector<double> out(rays);
  for (std::size_t r = 0; r < rays; ++r) out[r] = values[r * ns.size() + i];
  return out;
}

RaySamples sample_observable(const CodingModel& model, const Observable& obs, std::vector<int> ns, std::size_t rays,
                             std::uint64_t seed, int workers) {
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  const ChainSampler sampler(model.measure);
  std::optional<EdgePotential> potential;
  RayProgram program;
  program.model = &model;
  program.sampler = &sampler;
  program.checkpoints = ns;
  program.seed = seed;
  if (obs.window) {
    potential = window_lift(model.automaton, obs);
    program.potential = &*potential;
  } else {
    program.displacement = &obs;
  }
  RaySamples s;
  s.ns = ns;
  s.rays = rays;
  s.values = workers > 1 ? sample_values_parallel(program, rays, workers) : sample_values_serial(program, rays);
  return s;
}

DriftEstimate drift_from_samples(const std::vector<double>& values, int n) {
  if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rays");
  DriftEstimate d;
  double sum = 0.0;
  for (double v : values) sum += v / n;
  d.value = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v / n - d.value) * (v / n - d.value);
  d.spread = std::sqrt(ss / static_cast<double>(values.size() - 1));
  d.stderr_ = d.spread / std::sqrt(static_cast<double>(values.size()));
  return d;
}

DriftEstimate estimate_drift(const CodingModel& model, const Observable& obs, int n, std::size_t rays,
                             std::uint64_t seed, int workers) {
  if (rays < 100) throw Error(ErrorCode::InvalidArgument, "drift estimation needs at least 100 rays");
  const auto samples = sample_observable(model, obs, {n}, rays, seed, workers);
  DriftEstimate d = drift_from_samples(samples.values, n);
  if (obs.window) d.exact = exact_drift(window_lift(model.automaton, obs), model).value;
  return d;
}

double estimate_variance(const ExactDistribution& dist, double lambda) {
  if (dist.n < 1) throw Error(ErrorCode::InvalidArgument, "variance needs n >= 1");
  const double centre = dist.n * lambda;
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    const double x = dist.value(i) - centre;
    m1 += dist.probabilities[i] * x;
    m2 += dist.probabilities[i] * x * x;
  }
  return std::max(0.0, m2 - m1 * m1) / dist.n;
}

double estimate_variance(const std::vector<double>& values, int n, double lambda) {
  if (values.size() < 2 || n < 1) throw Error(ErrorCode::InvalidArgument, "variance needs two samples and n >= 1");
  double mean = 0.0;
  for (double v : values) mean += v - n * lambda;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - n * lambda - mean) * (v - n * lambda - mean);
  return ss / static_cast<double>(values.size() - 1) / n;
}

namespace {

double normal_cdf(double x, double sigma) { return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0))); }

void require_variance(double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::DegenerateVariance, "Gaussian comparison needs sigma^2 > 0");
}

}  // namespace

double ks_distance(const ExactDistribution& dist, double lambda, double sigma2) {
  require_variance(sigma2);
  const double sigma = std::sqrt(sigma2);
  const double root_n = std::sqrt(static_cast<double>(dist.n));
  double below = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    const double x = (dist.value(i) - dist.n * lambda) / root_n;
    const double g = normal_cdf(x, sigma);
    const double at = below + dist.probabilities[i];
    worst = std::max({worst, std::abs(below - g), std::abs(at - g)});
    below = at;
  }
  return worst;
}

double ks_distance(std::vector<double> values, int n, double lambda, double sigma2) {
  require_variance(sigma2);
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  const double sigma = std::sqrt(sigma2);
  const double root_n = std::sqrt(static_cast<double>(n));
  std::sort(values.begin(), values.end());
  const auto total = static_cast<double>(values.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double g = normal_cdf((values[i] - n * lambda) / root_n, sigma);
    worst = std::max({worst, std::abs(static_cast<double>(i) / total - g), std::abs(static_cast<double>(j) / total - g)});
    i = j;
  }
  return worst;
}

namespace {

std::vector<std::size_t> lattice_counts(const std::vector<double>& values, const ExactDistribution& dist,
                                        std::size_t& outside) {
  std::vector<std::size_t> counts(dist.probabilities.size(), 0);
  outside = 0;
  for (double v : values) {
    const auto idx = std::llround(v / dist.quantum) - dist.offset;
    if (idx < 0 || idx >= static_cast<long long>(counts.size())) ++outside;
    else ++counts[static_cast<std::size_t>(idx)];
  }
  return counts;
}

}  // namespace

double ks_distance(std::vector<double> values, const ExactDistribution& dist) {
  std::size_t outside = 0;
  const auto counts = lattice_counts(values, dist, outside);
  const auto total = static_cast<double>(values.size());
  double below_emp = 0.0, below_exact = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    below_emp += static_cast<double>(counts[i]) / total;
    below_exact += dist.probabilities[i];
    worst = std::max(worst, std::abs(below_emp - below_exact));
  }
  return std::max(worst, static_cast<double>(outside) / total);
}

double total_variation(const std::vector<double>& values, const ExactDistribution& dist) {
  std::size_t outside = 0;
  const auto counts = lattice_counts(values, dist, outside);
  const auto total = static_cast<double>(values.size());
  double tv = static_cast<double>(outside) / total;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(static_cast<double>(counts[i]) / total - dist.probabilities[i]);
  return 0.5 * tv;
}

RateFit rate_fit(const std::vector<std::pair<int, double>>& points) {
  RateFit fit;
  std::vector<double> xs, ys;
  for (const auto& [n, ks] : points) {
    if (!(ks > 0.0)) {
      fit.warnings.push_back("omitted n = " + std::to_string(n) + " with KS = 0");
      continue;
    }
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "rate fit needs n >= 1");
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(ks));
  }
  fit.used = xs.size();
  if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "rate fit needs at least two positive points");
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate fit needs distinct n values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.ci_low = fit.ci_high = fit.slope;
  if (xs.size() >= 3) {
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      sse += r * r;
    }
    const auto dof = static_cast<double>(xs.size() - 2);
    const double se = std::sqrt(sse / dof / sxx);
    const double t = boost::math::quantile(boost::math::students_t(dof), 0.975);
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;
  }
  return fit;
}

DegeneracyVerdict degeneracy_witness(const EdgePotential& potential, const CodingModel& model, double lambda) {
  const LatticeChain chain = lattice_chain(potential, model.measure);
  const std::size_t n = chain.states;
  std::vector<bool> allowed(n, false);
  for (std::size_t u = 0; u < n; ++u)
    allowed[u] = model.components.in_maximal(potential.base[u]) && (u == static_cast<std::size_t>(potential.start()) || !chain.in[u].empty());
  struct Step {
    int to;
    Letter label;
    double centered;
  };
  std::vector<std::vector<Step>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (!allowed[u]) continue;
    for (const auto& arc : chain.out[u]) {
      if (!allowed[static_cast<std::size_t>(arc.to)]) continue;
      const auto& e = std::find_if(potential.out[u].begin(), potential.out[u].end(),
                                   [&](const LiftedEdge& x) { return x.to == arc.to; });
      adj[u].push_back({arc.to, e->label, static_cast<double>(arc.units) * potential.quantum - lambda});
    }
    std::sort(adj[u].begin(), adj[u].end(), [](const Step& a, const Step& b) { return a.label < b.label; });
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(lambda));
  const Alphabet& alphabet = model.automaton.alphabet();

  DegeneracyVerdict v;
  std::vector<Letter> best_labels;
  std::vector<int> best_states;
  double best_sum = 0.0;

  // Short closed walks, canonically rotated; the lexicographically least witness wins.
  std::size_t work = 0;
  for (int len = 1; len <= 4 && best_labels.empty(); ++len) {
    std::vector<int> states;
    std::vector<Letter> labels;
    std::function<void(int, double)> walk = [&](int u, double sum) {
      if (++work > 5000000) return;
      if (static_cast<int>(labels.size()) == len) {
        if (u != states.front()) return;
        v.max_cycle_sum = std::max(v.max_cycle_sum, std::abs(sum));
        if (std::abs(sum) <= tol) return;
        // Rotate to the least label sequence.
        std::size_t shift = 0;
        for (std::size_t r = 1; r < labels.size(); ++r) {
          std::vector<Letter> a(labels.begin() + static_cast<std::ptrdiff_t>(r), labels.end());
          a.insert(a.end(), labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(r));
          std::vector<Letter> b(labels.begin() + static_cast<std::ptrdiff_t>(shift), labels.end());
          b.insert(b.end(), labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(shift));
          if (a < b) shift = r;
        }
        std::vector<Letter> rl(labels.begin() + static_cast<std::ptrdiff_t>(shift), labels.end());
        rl.insert(rl.end(), labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(shift));
        std::vector<int> rs(states.begin() + static_cast<std::ptrdiff_t>(shift), states.end());
        rs.insert(rs.end(), states.begin(), states.begin() + static_cast<std::ptrdiff_t>(shift));
        if (best_labels.empty() || std::tie(rl, rs) < std::tie(best_labels, best_states)) {
          best_labels = rl;
          best_states = rs;
          best_sum = sum;
        }
        return;
      }
      for (const auto& s : adj[static_cast<std::size_t>(u)]) {
        states.push_back(s.to);
        labels.push_back(s.label);
        walk(s.to, sum + s.centered);
        states.pop_back();
        labels.pop_back();
      }
    };
    for (std::size_t s = 0; s < n; ++s) {
      if (!allowed[s] || adj[s].empty()) continue;
      states.assign(1, static_cast<int>(s));
      labels.clear();
      // states holds the start followed by visited states; drop the duplicate start at the end.
      walk(static_cast<int>(s), 0.0);
    }
    for (auto& st : best_states) (void)st;
  }

  if (best_labels.empty()) {
    // Spanning-tree potential per component; an inconsistent edge closes a cycle with nonzero sum.
    std::vector<int> root(n, -1);
    std::vector<double> h(n, 0.0);
    std::vector<int> parent(n, -1);
    std::vector<Letter> parent_label(n, 0);
    for (std::size_t r = 0; r < n && best_labels.empty(); ++r) {
      if (!allowed[r] || root[r] >= 0) continue;
      std::vector<int> order{static_cast<int>(r)};
      root[r] = static_cast<int>(r);
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto u = static_cast<std::size_t>(order[i]);
        for (const auto& s : adj[u]) {
          const auto t = static_cast<std::size_t>(s.to);
          if (root[t] >= 0) continue;
          root[t] = static_cast<int>(r);
          h[t] = h[u] + s.centered;
          parent[t] = static_cast<int>(u);
          parent_label[t] = s.label;
          order.push_back(s.to);
        }
      }
      auto tree_path = [&](int to) {
        std::vector<std::pair<int, Letter>> p;
        for (int x = to; parent[static_cast<std::size_t>(x)] >= 0; x = parent[static_cast<std::size_t>(x)])
          p.emplace_back(x, parent_label[static_cast<std::size_t>(x)]);
        std::reverse(p.begin(), p.end());
        return p;
      };
      auto path_back = [&](int from) {
        // Shortest walk from `from` to r inside the component.
        std::vector<int> prev(n, -2);
        std::vector<Letter> via(n, 0);
        std::vector<int> q{from};
        prev[static_cast<std::size_t>(from)] = -1;
        for (std::size_t i = 0; i < q.size() && prev[r] == -2; ++i)
          for (const auto& s : adj[static_cast<std::size_t>(q[i])])
            if (prev[static_cast<std::size_t>(s.to)] == -2) {
              prev[static_cast<std::size_t>(s.to)] = q[i];
              via[static_cast<std::size_t>(s.to)] = s.label;
              q.push_back(s.to);
            }
        std::vector<std::pair<int, Letter>> p;
        if (prev[r] == -2) return std::optional<decltype(p)>{};
        for (int x = static_cast<int>(r); x != from; x = prev[static_cast<std::size_t>(x)])
          p.emplace_back(x, via[static_cast<std::size_t>(x)]);
        std::reverse(p.begin(), p.end());
        return std::optional<decltype(p)>{p};
      };
      for (const int u : order) {
        for (const auto& s : adj[static_cast<std::size_t>(u)]) {
          const auto t = static_cast<std::size_t>(s.to);
          if (root[t] != static_cast<int>(r)) continue;
          const double gap = h[static_cast<std::size_t>(u)] + s.centered - h[t];
          v.max_cycle_sum = std::max(v.max_cycle_sum, std::abs(gap));
          if (std::abs(gap) <= tol) continue;
          const auto back = path_back(s.to);
          if (!back) continue;  // edge leaves the strongly connected part
          double back_sum = 0.0;
          for (std::size_t i = 0; i < back->size(); ++i) {
            const int from = i == 0 ? s.to : (*back)[i - 1].first;
            for (const auto& st : adj[static_cast<std::size_t>(from)])
              if (st.to == (*back)[i].first && st.label == (*back)[i].second) {
                back_sum += st.centered;
                break;
              }
          }
          // Either root->t->root or root->u->t->root has a nonzero sum.
          std::vector<std::pair<int, Letter>> cycle;
          double sum = h[t] + back_sum;
          if (std::abs(sum) > tol) {
            cycle = tree_path(s.to);
          } else {
            cycle = tree_path(u);
            cycle.emplace_back(s.to, s.label);
            sum = h[static_cast<std::size_t>(u)] + s.centered + back_sum;
          }
          cycle.insert(cycle.end(), back->begin(), back->end());
          for (const auto& [state, label] : cycle) {
            best_states.push_back(state);
            best_labels.push_back(label);
          }
          // Rotate so the state list starts where the cycle starts (at r).
          std::rotate(best_states.rbegin(), best_states.rbegin() + 1, best_states.rend());
          best_sum = sum;
          break;
        }
        if (!best_labels.empty()) break;
      }
    }
  }

  if (best_labels.empty()) return v;
  v.degenerate = false;
  v.period_sum = best_sum;
  v.cycle_states = best_states;
  for (Letter x : best_labels) v.cycle.push_back(alphabet.name(x));
  // Shortest labeled path from * to the first cycle state.
  const int target = best_states.front();
  std::vector<int> prev(n, -2);
  std::vector<Letter> via(n, 0);
  std::vector<int> q{potential.start()};
  prev[static_cast<std::size_t>(potential.start())] = -1;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (const auto& arc : chain.out[static_cast<std::size_t>(q[i])])
      if (prev[static_cast<std::size_t>(arc.to)] == -2) {
        prev[static_cast<std::size_t>(arc.to)] = q[i];
        for (const auto& e : potential.out[static_cast<std::size_t>(q[i])])
          if (e.to == arc.to) via[static_cast<std::size_t>(arc.to)] = e.label;
        q.push_back(arc.to);
      }
  std::vector<std::string> prefix;
  for (int x = target; x >= 0 && prev[static_cast<std::size_t>(x)] != -1; x = prev[static_cast<std::size_t>(x)])
    prefix.push_back(alphabet.name(via[static_cast<std::size_t>(x)]));
  std::reverse(prefix.begin(), prefix.end());
  v.prefix = std::move(prefix);
  return v;
}

}  // namespace psclt
