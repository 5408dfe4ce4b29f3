#include "psclt/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "psclt/error.hpp"
#include "psclt/measures.hpp"
#include "psclt/rational.hpp"
#include "psclt/surface_group.hpp"

namespace psclt {

std::string Observable::kind_name() const {
  switch (kind) {
    case Kind::homomorphism: return "homomorphism";
    case Kind::brooks: return "brooks";
    case Kind::weighted_length: return "weighted_length";
    case Kind::schottky_displacement: return "schottky_displacement";
  }
  return "unknown";
}

std::string Observable::describe() const {
  std::ostringstream os;
  os << kind_name();
  if (kind == Kind::brooks) {
    os << " " << alphabet.format(word);
  } else if (kind == Kind::homomorphism || kind == Kind::weighted_length) {
    os << " (";
    for (std::size_t i = 0; i < weights.size(); i += 2) os << (i ? "," : "") << alphabet.names()[i] << "=" << weights[i];
    os << ")";
  }
  return os.str();
}

nlohmann::json Observable::to_json() const {
  nlohmann::json j{{"kind", kind_name()}, {"group", group.describe()}};
  if (kind == Kind::brooks) j["word"] = alphabet.format(word);
  if (kind == Kind::homomorphism || kind == Kind::weighted_length) {
    nlohmann::json w = nlohmann::json::object();
    for (std::size_t i = 0; i < weights.size(); ++i) w[alphabet.names()[i]] = weights[i];
    j[kind == Kind::homomorphism ? "weights" : "lengths"] = w;
  }
  if (kind == Kind::schottky_displacement) j["origin"] = {origin.real(), origin.imag()};
  j["window"] = window ? nlohmann::json(*window) : nlohmann::json(nullptr);
  j["quantum"] = quantum ? nlohmann::json(*quantum) : nlohmann::json(nullptr);
  return j;
}

namespace {

std::optional<double> lattice_quantum(const std::vector<double>& values) {
  long den = 1;
  std::vector<Rational> qs;
  for (double v : values) {
    const auto q = rational_approximation(v, 10000, 1e-12);
    if (!q) return std::nullopt;
    qs.push_back(*q);
    den = std::lcm(den, q->get_den().get_si());
  }
  long g = 0;
  for (const auto& q : qs) g = std::gcd(g, std::labs(Rational(q * den).get_num().get_si()));
  if (g == 0) return std::nullopt;
  return static_cast<double>(g) / static_cast<double>(den);
}

// Fills the per-letter table from per-generator or per-letter entries.
std::vector<double> letter_table(const Alphabet& alphabet, const std::map<std::string, double>& given, double sign) {
  std::vector<double> out(alphabet.size(), 0.0);
  std::vector<bool> set(alphabet.size(), false);
  for (const auto& [name, value] : given) {
    const Letter x = alphabet.find(name);
    if (x < 0) throw Error(ErrorCode::InvalidArgument, "unknown letter '" + name + "'");
    out[static_cast<std::size_t>(x)] = value;
    set[static_cast<std::size_t>(x)] = true;
  }
  for (std::size_t x = 0; x < alphabet.size(); ++x) {
    const auto inv = static_cast<std::size_t>(alphabet.inverse(static_cast<Letter>(x)));
    if (set[x] && !set[inv]) {
      out[inv] = sign * out[x];
      set[inv] = true;
    }
    if (set[x] && set[inv] && std::abs(out[inv] - sign * out[x]) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "values of " + alphabet.names()[x] + " and its inverse are inconsistent");
  }
  return out;
}

}  // namespace

Observable make_homomorphism(const GroupSpec& group, const std::map<std::string, double>& weights) {
  Observable o;
  o.kind = Observable::Kind::homomorphism;
  o.group = group;
  o.alphabet = group.alphabet();
  o.weights = letter_table(o.alphabet, weights, -1.0);
  if (group.kind == GroupSpec::Kind::surface) {
    double s = 0.0;
    const SurfacePresentation presentation(group.param);
    for (Letter x : presentation.relator()) s += o.weights[static_cast<std::size_t>(x)];
    if (std::abs(s) > 1e-12) throw Error(ErrorCode::InvalidArgument, "weights do not vanish on the relator");
  }
  o.window = 1;
  if (std::all_of(o.weights.begin(), o.weights.end(), [](double w) { return w == 0.0; })) {
    o.warnings.push_back("TrivialHomomorphism: all weights are zero");
    o.quantum = 1.0;
  } else {
    o.quantum = lattice_quantum(o.weights);
  }
  return o;
}

Observable make_brooks(const GroupSpec& group, const Word& w) {
  Observable o;
  o.kind = Observable::Kind::brooks;
  o.group = group;
  o.alphabet = group.alphabet();
  for (Letter x : w)
    if (x < 0 || static_cast<std::size_t>(x) >= o.alphabet.size()) throw Error(ErrorCode::NotGeodesic, "letter out of range");
  if (!is_freely_reduced(w, o.alphabet)) throw Error(ErrorCode::NotGeodesic, "Brooks word must be reduced");
  if (w.size() < 2) throw Error(ErrorCode::InvalidArgument, "Brooks word must have length >= 2");
  o.word = w;
  o.window = static_cast<int>(w.size());
  o.quantum = 1.0;
  return o;
}

Observable make_weighted_length(const GroupSpec& group, const std::map<std::string, double>& lengths) {
  Observable o;
  o.kind = Observable::Kind::weighted_length;
  o.group = group;
  o.alphabet = group.alphabet();
  for (const auto& [name, value] : lengths)
    if (!(value > 0.0)) throw Error(ErrorCode::InvalidMetric, "length of " + name + " must be positive");
  o.weights = letter_table(o.alphabet, lengths, 1.0);
  for (std::size_t x = 0; x < o.weights.size(); ++x)
    if (!(o.weights[x] > 0.0)) throw Error(ErrorCode::InvalidMetric, "no length for " + o.alphabet.names()[x]);
  o.window = 1;
  o.quantum = lattice_quantum(o.weights);
  return o;
}

Observable make_schottky_displacement(const GroupSpec& group, const std::map<std::string, Mat2>& matrices,
                                      std::complex<double> origin) {
  if (!(origin.imag() > 0.0)) throw Error(ErrorCode::InvalidOrigin, "origin must lie in the upper half-plane");
  Observable o;
  o.kind = Observable::Kind::schottky_displacement;
  o.group = group;
  o.alphabet = group.alphabet();
  o.origin = origin;
  std::vector<std::optional<Mat2>> given(o.alphabet.size());
  for (const auto& [name, m] : matrices) {
    const Letter x = o.alphabet.find(name);
    if (x < 0) throw Error(ErrorCode::InvalidArgument, "unknown letter '" + name + "'");
    if (std::abs(m.det() - 1.0) > 1e-10) throw Error(ErrorCode::InvalidArgument, "matrix for " + name + " must have determinant 1");
    given[static_cast<std::size_t>(x)] = m;
  }
  // C maps i to the origin; conjugating by C moves the base point to i.
  const double y = origin.imag();
  const Mat2 c{std::sqrt(y), origin.real() / std::sqrt(y), 0.0, 1.0 / std::sqrt(y)};
  o.matrices.resize(o.alphabet.size());
  for (std::size_t x = 0; x < o.alphabet.size(); ++x) {
    const auto inv = static_cast<std::size_t>(o.alphabet.inverse(static_cast<Letter>(x)));
    Mat2 m;
    if (given[x]) m = *given[x];
    else if (given[inv]) m = given[inv]->inverse();
    else throw Error(ErrorCode::InvalidArgument, "no matrix for " + o.alphabet.names()[x]);
    if (given[x] && given[inv]) {
      const Mat2 p = *given[x] * *given[inv];
      if (std::abs(p.a - 1) + std::abs(p.b) + std::abs(p.c) + std::abs(p.d - 1) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "matrices of " + o.alphabet.names()[x] + " and its inverse are not inverse");
    }
    o.matrices[x] = c.inverse() * m * c;
  }
  return o;
}

Observable default_schottky() {
  const double h = std::sqrt(0.5);
  const Mat2 rot{h, h, -h, h};
  const Mat2 a{2.0, 0.0, 0.0, 0.5};
  const Mat2 b = rot * Mat2{4.0, 0.0, 0.0, 0.25} * rot.inverse();
  return make_schottky_displacement(GroupSpec::free_group(2), {{"a", a}, {"b", b}}, {0.0, 1.0});
}

Observable observable_from_json(const GroupSpec& group, const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "homomorphism") return make_homomorphism(group, j.at("weights").get<std::map<std::string, double>>());
    if (kind == "weighted_length") return make_weighted_length(group, j.at("lengths").get<std::map<std::string, double>>());
    if (kind == "word_length") {
      std::map<std::string, double> ones;
      const Alphabet alphabet = group.alphabet();
      for (const auto& n : alphabet.names()) ones[n] = 1.0;
      return make_weighted_length(group, ones);
    }
    if (kind == "brooks") return make_brooks(group, group.alphabet().parse(j.at("word").get<std::string>()));
    if (kind == "schottky_displacement") {
      if (!j.contains("matrices")) {
        if (group != GroupSpec::free_group(2))
          throw Error(ErrorCode::InvalidConfig, "default Schottky matrices are for free rank 2; give \"matrices\"");
        return default_schottky();
      }
      std::map<std::string, Mat2> mats;
      for (const auto& [name, m] : j.at("matrices").items()) {
        const auto rows = m.get<std::vector<std::vector<double>>>();
        if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
          throw Error(ErrorCode::InvalidConfig, "matrix for " + name + " must be 2x2");
        mats[name] = {rows[0][0], rows[0][1], rows[1][0], rows[1][1]};
      }
      const auto o = j.value("origin", std::vector<double>{0.0, 1.0});
      if (o.size() != 2) throw Error(ErrorCode::InvalidConfig, "origin must be [re, im]");
      return make_schottky_displacement(group, mats, {o[0], o[1]});
    }
    throw Error(ErrorCode::InvalidConfig, "unknown observable kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("observable: ") + e.what());
  }
}

void DisplacementAccumulator::push(Letter x) {
  m_ = m_ * obs_->matrices[static_cast<std::size_t>(x)];
  const double top = std::max({std::abs(m_.a), std::abs(m_.b), std::abs(m_.c), std::abs(m_.d)});
  if (top > 1e100 || top < 1e-100) {
    m_ = {m_.a / top, m_.b / top, m_.c / top, m_.d / top};
    log_scale_ += std::log(top);
  }
}

double DisplacementAccumulator::value() const {
  // cosh d = |M|_F^2 / 2 for M in SL(2,R) acting at i.
  const double f2 = m_.a * m_.a + m_.b * m_.b + m_.c * m_.c + m_.d * m_.d;
  const double log_cosh = 2.0 * log_scale_ + std::log(f2) - std::log(2.0);
  if (log_cosh > 20.0) return log_cosh + std::log(2.0);
  const double c = std::max(1.0, std::exp(log_cosh));
  return std::acosh(c);
}

double evaluate_unchecked(const Observable& obs, const Word& w) {
  switch (obs.kind) {
    case Observable::Kind::homomorphism:
    case Observable::Kind::weighted_length: {
      double s = 0.0;
      for (Letter x : w) s += obs.weights[static_cast<std::size_t>(x)];
      return s;
    }
    case Observable::Kind::brooks: {
      const Word inv = obs.alphabet.invert(obs.word);
      const std::size_t k = obs.word.size();
      long count = 0;
      for (std::size_t i = 0; i + k <= w.size(); ++i) {
        if (std::equal(obs.word.begin(), obs.word.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) ++count;
        if (std::equal(inv.begin(), inv.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) --count;
      }
      return static_cast<double>(count);
    }
    case Observable::Kind::schottky_displacement: {
      DisplacementAccumulator acc(obs);
      for (Letter x : w) acc.push(x);
      return acc.value();
    }
  }
  return 0.0;
}

double evaluate(const Observable& obs, const Word& w) {
  for (Letter x : w)
    if (x < 0 || static_cast<std::size_t>(x) >= obs.alphabet.size()) throw Error(ErrorCode::NotGeodesic, "letter out of range");
  if (!is_normal_form(obs.group, w)) throw Error(ErrorCode::NotGeodesic, "not in normal form: " + obs.alphabet.format(w));
  return evaluate_unchecked(obs, w);
}

double EdgePotential::path_sum(const Word& w) const {
  int v = start();
  double s = 0.0;
  for (Letter x : w) {
    const LiftedEdge* hit = nullptr;
    for (const auto& e : out[static_cast<std::size_t>(v)])
      if (e.label == x) hit = &e;
    if (!hit) throw Error(ErrorCode::NotAPath, "lifted automaton has no path for this word");
    s += hit->weight;
    v = hit->to;
  }
  return s;
}

std::string EdgePotential::name(const MarkovAutomaton& m, int v) const {
  const auto i = static_cast<std::size_t>(v);
  std::string h;
  for (Letter x : history[i]) h += m.alphabet().name(x);
  return m.vertices()[static_cast<std::size_t>(base[i])].name + "|" + h;
}

EdgePotential window_lift(const MarkovAutomaton& m, const Observable& obs) {
  if (!obs.window) throw Error(ErrorCode::NotWindowLocal, obs.kind_name() + " has no finite window");
  if (!obs.quantum) throw Error(ErrorCode::InvalidArgument, "observable values are not on a rational lattice");
  if (!(m.alphabet() == obs.alphabet)) throw Error(ErrorCode::InvalidArgument, "alphabet mismatch");
  EdgePotential p;
  p.window = *obs.window;
  p.quantum = *obs.quantum;
  const Word inv = obs.alphabet.invert(obs.word);
  std::map<std::pair<int, Word>, int> index;
  auto intern = [&](int v, Word h) {
    auto [it, inserted] = index.emplace(std::make_pair(v, h), static_cast<int>(p.base.size()));
    if (inserted) {
      p.base.push_back(v);
      p.history.push_back(std::move(h));
      p.out.emplace_back();
    }
    return it->second;
  };
  intern(m.start(), {});
  for (std::size_t u = 0; u < p.base.size(); ++u) {
    const int v = p.base[u];
    for (int ei : m.out(v)) {
      const Edge& e = m.edges()[static_cast<std::size_t>(ei)];
      if (e.label == kIdentityLabel) continue;
      Word h = p.history[u];
      h.push_back(e.label);
      if (static_cast<int>(h.size()) > p.window) h.erase(h.begin());
      double w = 0.0;
      switch (obs.kind) {
        case Observable::Kind::homomorphism:
        case Observable::Kind::weighted_length: w = obs.weights[static_cast<std::size_t>(e.label)]; break;
        case Observable::Kind::brooks:
          if (h == obs.word) w = 1.0;
          else if (h == inv) w = -1.0;
          break;
        case Observable::Kind::schottky_displacement: break;
      }
      const double units = w / p.quantum;
      if (std::abs(units - std::round(units)) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "edge weight off the lattice");
      const int to = intern(e.to, std::move(h));
      p.out[u].push_back({to, e.label, w, static_cast<std::int64_t>(std::llround(units))});
    }
  }
  return p;
}

Condition2Report condition2_check(const MarkovAutomaton& m, const Observable& obs, int samples, int length,
                                  std::uint64_t seed) {
  if (!m.group()) throw Error(ErrorCode::InvalidArgument, "automaton has no group");
  const GroupSpec group = *m.group();
  const auto k = static_cast<Letter>(obs.alphabet.size());
  auto random_word = [&](std::mt19937_64& rng) {
    Word w;
    int v = m.start();
    for (int i = 0; i < length; ++i) {
      std::vector<const Edge*> opts;
      for (int e : m.out(v))
        if (m.edges()[static_cast<std::size_t>(e)].label != kIdentityLabel) opts.push_back(&m.edges()[static_cast<std::size_t>(e)]);
      if (opts.empty()) break;
      const auto* e = opts[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(opts.size()))];
      w.push_back(e->label);
      v = e->to;
    }
    return w;
  };
  Condition2Report r;
  for (int i = 0; i < samples; ++i) {
    auto rng = ray_stream(seed, static_cast<std::uint64_t>(i));
    const Word g = random_word(rng);
    const Word h = random_word(rng);
    const double fg = evaluate_unchecked(obs, g);
    for (Letter s = 0; s < k; ++s) {
      Word sg{s};
      sg.insert(sg.end(), g.begin(), g.end());
      Word gs = g;
      gs.push_back(s);
      r.left_constant = std::max(r.left_constant, std::abs(evaluate_unchecked(obs, normal_form(group, sg)) - fg));
      r.right_constant = std::max(r.right_constant, std::abs(evaluate_unchecked(obs, normal_form(group, gs)) - fg));
    }
    const double fgh = evaluate_unchecked(obs, multiply(group, g, h));
    r.defect = std::max(r.defect, std::abs(fgh - fg - evaluate_unchecked(obs, h)));
  }
  return r;
}

}  // namespace psclt
