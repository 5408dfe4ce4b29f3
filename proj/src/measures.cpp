#include "psclt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "psclt/error.hpp"

namespace psclt {

void CylinderMeasure::check_path(const Path& p) const {
  const auto& m = model_->automaton;
  if (p.empty() || p.front() != m.start()) throw Error(ErrorCode::NotAPath, "cylinder path must start at *");
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] < 0 || static_cast<std::size_t>(p[i]) >= m.size() || !m.has_edge(p[i - 1], p[i]))
      throw Error(ErrorCode::NotAPath, "no edge at step " + std::to_string(i));
}

double CylinderMeasure::mass(const Path& p) const {
  check_path(p);
  const auto& s = model_->spectrum;
  const double ratio = s.p_one[static_cast<std::size_t>(p.back())] / s.p_one[static_cast<std::size_t>(p.front())];
  return ratio * std::pow(s.lambda, -static_cast<double>(p.size() - 1));
}

Rational CylinderMeasure::mass_exact(const Path& p) const {
  if (!exact()) throw Error(ErrorCode::InvalidArgument, "model has no exact spectral data");
  check_path(p);
  const auto& e = *model_->spectrum.exact;
  Rational scale = 1;
  for (std::size_t i = 1; i < p.size(); ++i) scale *= e.lambda;
  return e.p_one[static_cast<std::size_t>(p.back())] / (e.p_one[static_cast<std::size_t>(p.front())] * scale);
}

std::vector<double> CylinderMeasure::next_step(int v) const {
  const auto& s = model_->spectrum;
  if (v < 0 || static_cast<std::size_t>(v) >= s.p_one.size()) throw Error(ErrorCode::InvalidArgument, "vertex out of range");
  if (s.p_one[static_cast<std::size_t>(v)] <= 0.0)
    throw Error(ErrorCode::NullState, "p(1) vanishes at " + model_->automaton.vertices()[static_cast<std::size_t>(v)].name);
  const auto& n = model_->measure;
  return {n.N.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(v) * n.n),
          n.N.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(v) + 1) * n.n)};
}

std::mt19937_64 ray_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return std::mt19937_64(z ^ (z >> 31));
}

ChainSampler::ChainSampler(const MarkovMeasure& measure)
    : targets_(measure.n), cumulative_(measure.n) {
  for (std::size_t i = 0; i < measure.n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < measure.n; ++j) {
      const double x = measure(i, j);
      if (x <= 0.0) continue;
      acc += x;
      targets_[i].push_back(static_cast<int>(j));
      cumulative_[i].push_back(acc);
    }
  }
  double acc = 0.0;
  for (std::size_t v = 0; v < measure.n; ++v) {
    if (measure.rho[v] <= 0.0) continue;
    acc += measure.rho[v];
    rho_support_.push_back(static_cast<int>(v));
    rho_cumulative_.push_back(acc);
  }
}

namespace {

int pick(const std::vector<int>& targets, const std::vector<double>& cumulative, double u) {
  const double x = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), targets.size() - 1);
  return targets[i];
}

}  // namespace

int ChainSampler::step(int v, std::mt19937_64& rng) const {
  const auto i = static_cast<std::size_t>(v);
  return pick(targets_[i], cumulative_[i], uniform01(rng));
}

int ChainSampler::draw_initial(std::mt19937_64& rng) const { return pick(rho_support_, rho_cumulative_, uniform01(rng)); }

RaySample sample_ray(const CodingModel& model, RayKind kind, int length, std::uint64_t seed, int checkpoint_every) {
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "ray length must be >= 1");
  const ChainSampler sampler(model.measure);
  auto rng = ray_stream(seed, 0);
  RaySample ray;
  ray.seed = seed;
  ray.path.reserve(static_cast<std::size_t>(length) + 1);
  ray.path.push_back(kind == RayKind::boundary ? model.start() : sampler.draw_initial(rng));
  for (int step = 1; step <= length; ++step) {
    ray.path.push_back(sampler.step(ray.path.back(), rng));
    if ((checkpoint_every > 0 && step % checkpoint_every == 0) || step == length)
      if (ray.checkpoints.empty() || ray.checkpoints.back().first != step) ray.checkpoints.emplace_back(step, ray.path.back());
  }
  return ray;
}

PushforwardTable pushforward_table(const CodingModel& model, int max_k) {
  if (max_k < 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 0");
  const TransitionMatrix& a = model.a_prime;
  const auto& s = model.spectrum;
  const auto& rho = model.measure.rho;
  const auto start = static_cast<std::size_t>(model.start());
  PushforwardTable t;
  t.max_k = max_k;
  t.n = a.n;
  t.nu.assign(static_cast<std::size_t>(max_k + 1) * a.n, 0.0);
  t.alpha.assign(t.nu.size(), 0.0);

  // q_k(v) = (A'^k)_{*,v} / lambda^k.
  std::vector<double> q(a.n, 0.0);
  q[start] = 1.0;
  for (int k = 0; k <= max_k; ++k) {
    for (std::size_t v = 0; v < a.n; ++v) {
      const double nu = q[v] * s.p_one[v] / s.p_one[start];
      const std::size_t at = static_cast<std::size_t>(k) * a.n + v;
      t.nu[at] = nu;
      t.alpha[at] = rho[v] > 0.0 ? nu / rho[v] : nu;
    }
    std::vector<double> next(a.n, 0.0);
    for (std::size_t i = 0; i < a.n; ++i)
      if (q[i] != 0.0)
        for (std::size_t j = 0; j < a.n; ++j) next[j] += static_cast<double>(a(i, j)) * q[i] / s.lambda;
    q = std::move(next);
  }

  if (model.exact()) {
    const auto& e = *s.exact;
    const auto& er = model.measure.exact->rho;
    std::vector<Rational> nu(t.nu.size()), alpha(t.nu.size());
    std::vector<Rational> qe(a.n);
    qe[start] = 1;
    for (int k = 0; k <= max_k; ++k) {
      for (std::size_t v = 0; v < a.n; ++v) {
        const std::size_t at = static_cast<std::size_t>(k) * a.n + v;
        nu[at] = qe[v] * e.p_one[v] / e.p_one[start];
        alpha[at] = er[v] > 0 ? Rational(nu[at] / er[v]) : nu[at];
        t.nu[at] = to_double(nu[at]);
        t.alpha[at] = to_double(alpha[at]);
      }
      std::vector<Rational> next(a.n);
      for (std::size_t i = 0; i < a.n; ++i)
        if (qe[i] != 0)
          for (std::size_t j = 0; j < a.n; ++j)
            if (a(i, j) != 0) next[j] += Rational(static_cast<long>(a(i, j))) * qe[i] / e.lambda;
      qe = std::move(next);
    }
    t.nu_exact = std::move(nu);
    t.alpha_exact = std::move(alpha);
  }
  return t;
}

double pushforward_coefficient(const CodingModel& model, int k, int v) {
  if (v < 0 || static_cast<std::size_t>(v) >= model.a_prime.n)
    throw Error(ErrorCode::InvalidArgument, "vertex out of range for A'");
  return pushforward_table(model, k)(k, v);
}

std::vector<ExactValue> cesaro_tv_series(const CodingModel& model, int max_n) {
  if (max_n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const auto table = pushforward_table(model, max_n);
  const std::size_t n_vert = table.n;
  std::vector<ExactValue> out;
  std::vector<double> sum(n_vert, 0.0);
  std::vector<Rational> sum_exact(model.exact() ? n_vert : 0);
  for (std::size_t v = 0; v < n_vert; ++v) {
    sum[v] = table.shifted_mass(0, static_cast<int>(v));
    if (model.exact()) sum_exact[v] = (*table.nu_exact)[v];
  }
  for (int n = 1; n <= max_n; ++n) {
    double pos = 0.0, neg = 0.0;
    Rational pos_e = 0, neg_e = 0;
    for (std::size_t v = 0; v < n_vert; ++v) {
      sum[v] += table.shifted_mass(n, static_cast<int>(v));
      const double d = sum[v] / n - model.measure.rho[v];
      (d > 0 ? pos : neg) += std::abs(d);
      if (model.exact()) {
        sum_exact[v] += (*table.nu_exact)[static_cast<std::size_t>(n) * n_vert + v];
        const Rational de = sum_exact[v] / n - model.measure.exact->rho[v];
        if (de > 0) pos_e += de;
        else neg_e -= de;
      }
    }
    ExactValue ev;
    if (model.exact()) {
      ev.exact = pos_e > neg_e ? pos_e : neg_e;
      ev.value = to_double(*ev.exact);
    } else {
      ev.value = std::max(pos, neg);
    }
    out.push_back(std::move(ev));
  }
  return out;
}

ExactValue cesaro_tv_depth1(const CodingModel& model, int n) { return cesaro_tv_series(model, n).back(); }

ExactValue truncation_tail(const CodingModel& model, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 0");
  const TransitionMatrix& a = model.a_prime;
  const auto& s = model.spectrum;
  const auto start = static_cast<std::size_t>(model.start());
  std::vector<bool> transient(a.n);
  for (std::size_t v = 0; v < a.n; ++v) transient[v] = !model.components.in_maximal(static_cast<int>(v));
  ExactValue out;
  if (model.exact()) {
    const auto& e = *s.exact;
    std::vector<Rational> q(a.n);
    q[start] = 1;
    for (int k = 0; k <= n; ++k) {
      std::vector<Rational> next(a.n);
      for (std::size_t i = 0; i < a.n; ++i)
        if (transient[i] && q[i] != 0)
          for (std::size_t j = 0; j < a.n; ++j)
            if (transient[j] && a(i, j) != 0) next[j] += Rational(static_cast<long>(a(i, j))) * q[i] / e.lambda;
      q = std::move(next);
    }
    Rational tail = 0;
    for (std::size_t v = 0; v < a.n; ++v) tail += q[v] * e.p_one[v] / e.p_one[start];
    out.value = to_double(tail);
    out.exact = tail;
    return out;
  }
  std::vector<double> q(a.n, 0.0);
  q[start] = 1.0;
  for (int k = 0; k <= n; ++k) {
    std::vector<double> next(a.n, 0.0);
    for (std::size_t i = 0; i < a.n; ++i)
      if (transient[i] && q[i] != 0.0)
        for (std::size_t j = 0; j < a.n; ++j)
          if (transient[j]) next[j] += static_cast<double>(a(i, j)) * q[i] / s.lambda;
    q = std::move(next);
  }
  for (std::size_t v = 0; v < a.n; ++v) out.value += q[v] * s.p_one[v] / s.p_one[start];
  return out;
}

void write_rays_csv(const std::string& path, const CodingModel& model, const std::vector<RaySample>& rays) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  const auto& m = model.automaton;
  out << "ray_index,step,vertex_name,letter\n";
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const auto& p = rays[r].path;
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::string letter;
      if (i > 0)
        for (int e : m.out(p[i - 1]))
          if (m.edges()[static_cast<std::size_t>(e)].to == p[i]) {
            const Letter l = m.edges()[static_cast<std::size_t>(e)].label;
            letter = l == kIdentityLabel ? std::string(kIdentityToken) : m.alphabet().name(l);
          }
      out << r << ',' << i << ',' << m.vertices()[static_cast<std::size_t>(p[i])].name << ',' << letter << '\n';
    }
  }
}

void write_series_csv(const std::string& path, const std::vector<std::pair<int, double>>& series) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out.precision(17);
  out << "n,value\n";
  for (const auto& [n, v] : series) out << n << ',' << v << '\n';
}

}  // namespace psclt
