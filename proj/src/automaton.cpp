#include "psclt/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "psclt/error.hpp"
#include "psclt/surface_group.hpp"

namespace psclt {

MarkovAutomaton::MarkovAutomaton(Alphabet alphabet, std::optional<GroupSpec> group, std::vector<Vertex> vertices,
                                 std::vector<Edge> edges, bool augmented)
    : alphabet_(std::move(alphabet)),
      group_(group),
      vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      augmented_(augmented) {
  const int n = static_cast<int>(vertices_.size());
  if (n == 0 || !vertices_.front().initial) throw Error(ErrorCode::InvalidArgument, "first vertex must be initial");
  for (int v = 1; v < n; ++v)
    if (vertices_[static_cast<std::size_t>(v)].initial)
      throw Error(ErrorCode::InvalidArgument, "more than one initial vertex");
  for (int v = 0; v < n; ++v) {
    const bool is_zero = vertices_[static_cast<std::size_t>(v)].zero;
    if (is_zero && (!augmented_ || v != n - 1))
      throw Error(ErrorCode::InvalidArgument, "zero vertex must be last and only present when augmented");
  }
  if (augmented_ && !vertices_.back().zero) throw Error(ErrorCode::InvalidArgument, "augmented automaton lacks 0");
  out_.assign(vertices_.size(), {});
  std::set<std::pair<int, Letter>> seen;
  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.to == start()) throw Error(ErrorCode::InvalidArgument, "edge ends at the initial vertex");
    if (e.label != kIdentityLabel && (e.label < 0 || static_cast<std::size_t>(e.label) >= alphabet_.size()))
      throw Error(ErrorCode::InvalidArgument, "edge label out of range");
    if (e.label == kIdentityLabel && e.to != zero())
      throw Error(ErrorCode::InvalidArgument, "identity-labeled edge must end at 0");
    if (e.label != kIdentityLabel && e.to == zero())
      throw Error(ErrorCode::InvalidArgument, "letter-labeled edge ends at 0");
    if (!seen.emplace(e.from, e.label).second)
      throw Error(ErrorCode::InvalidArgument, "two edges share source and label at " + vertices_[static_cast<std::size_t>(e.from)].name);
    if (!pairs.emplace(e.from, e.to).second)
      throw Error(ErrorCode::InvalidArgument, "parallel edges between " + vertices_[static_cast<std::size_t>(e.from)].name +
                                                  " and " + vertices_[static_cast<std::size_t>(e.to)].name);
    out_[static_cast<std::size_t>(e.from)].push_back(static_cast<int>(i));
  }
}

int MarkovAutomaton::next(int v, Letter x) const {
  for (int i : out(v))
    if (edges_[static_cast<std::size_t>(i)].label == x) return edges_[static_cast<std::size_t>(i)].to;
  return -1;
}

bool MarkovAutomaton::has_edge(int from, int to) const {
  for (int i : out(from))
    if (edges_[static_cast<std::size_t>(i)].to == to) return true;
  return false;
}

MarkovAutomaton build_free_automaton(int rank) {
  if (rank < 2) throw Error(ErrorCode::NotNonElementary, "free rank must be >= 2, got " + std::to_string(rank));
  const Alphabet alphabet = Alphabet::free(rank);
  std::vector<Vertex> vertices{{"*", true, false}};
  for (const auto& name : alphabet.names()) vertices.push_back({"v_" + name, false, false});
  std::vector<Edge> edges;
  const auto k = static_cast<Letter>(alphabet.size());
  for (Letter x = 0; x < k; ++x) edges.push_back({0, x + 1, x});
  for (Letter x = 0; x < k; ++x)
    for (Letter y = 0; y < k; ++y)
      if (y != alphabet.inverse(x)) edges.push_back({x + 1, y + 1, y});
  return MarkovAutomaton(alphabet, GroupSpec::free_group(rank), std::move(vertices), std::move(edges), false);
}

namespace {

const WordAcceptor& cached_surface_acceptor(int genus) {
  static std::mutex mutex;
  static std::map<int, WordAcceptor> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(genus);
  if (it == cache.end()) it = cache.emplace(genus, build_surface_shortlex_acceptor(genus)).first;
  return it->second;
}

}  // namespace

MarkovAutomaton build_surface_automaton(int genus) {
  if (genus < 2) throw Error(ErrorCode::NotHyperbolic, "surface genus must be >= 2, got " + std::to_string(genus));
  const WordAcceptor& dfa = cached_surface_acceptor(genus);
  const Alphabet alphabet = Alphabet::surface(genus);
  // Vertices are (acceptor state, incoming letter), which makes labels a function of the target.
  std::map<std::pair<int, Letter>, int> index;
  std::vector<std::pair<int, Letter>> order{{0, kIdentityLabel}};
  std::vector<Vertex> vertices{{"*", true, false}};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int state = order[i].first;
    for (std::size_t x = 0; x < dfa.alphabet_size; ++x) {
      const int to = dfa.transitions[static_cast<std::size_t>(state)][x];
      if (to < 0) continue;
      const std::pair<int, Letter> key{to, static_cast<Letter>(x)};
      auto [it, inserted] = index.emplace(key, static_cast<int>(order.size()));
      if (inserted) {
        order.push_back(key);
        vertices.push_back({"q" + std::to_string(to) + "_" + alphabet.name(static_cast<Letter>(x)), false, false});
      }
      edges.push_back({static_cast<int>(i), it->second, static_cast<Letter>(x)});
    }
  }
  return MarkovAutomaton(alphabet, GroupSpec::surface_group(genus), std::move(vertices), std::move(edges), false);
}

MarkovAutomaton build_automaton(const GroupSpec& group) {
  return group.kind == GroupSpec::Kind::free ? build_free_automaton(group.param) : build_surface_automaton(group.param);
}

MarkovAutomaton augment(const MarkovAutomaton& m) {
  if (m.augmented()) throw Error(ErrorCode::AlreadyAugmented, "automaton already has a 0 vertex");
  std::vector<Vertex> vertices = m.vertices();
  std::vector<Edge> edges = m.edges();
  const int zero = static_cast<int>(vertices.size());
  vertices.push_back({"0", false, true});
  for (int v = 1; v <= zero; ++v) edges.push_back({v, zero, kIdentityLabel});
  return MarkovAutomaton(m.alphabet(), m.group(), std::move(vertices), std::move(edges), true);
}

Path encode(const MarkovAutomaton& m, const Word& w) {
  const Alphabet& alphabet = m.alphabet();
  for (Letter x : w)
    if (x < 0 || static_cast<std::size_t>(x) >= alphabet.size())
      throw Error(ErrorCode::NotGeodesic, "letter out of range");
  const bool normal = m.group() ? is_normal_form(*m.group(), w) : is_freely_reduced(w, alphabet);
  if (!normal) throw Error(ErrorCode::NotGeodesic, "word is not in normal form: " + alphabet.format(w));
  Path p{m.start()};
  for (Letter x : w) {
    const int to = m.next(p.back(), x);
    if (to < 0) throw Error(ErrorCode::CodingBug, "no path spells " + alphabet.format(w));
    p.push_back(to);
  }
  return p;
}

Word decode(const MarkovAutomaton& m, const Path& p) {
  if (p.empty() || p.front() != m.start()) throw Error(ErrorCode::NotAPath, "path must start at *");
  Word w;
  bool in_tail = false;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const int from = p[i - 1];
    const int to = p[i];
    if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= m.size() || static_cast<std::size_t>(to) >= m.size())
      throw Error(ErrorCode::NotAPath, "vertex out of range");
    const Edge* edge = nullptr;
    for (int e : m.out(from))
      if (m.edges()[static_cast<std::size_t>(e)].to == to) edge = &m.edges()[static_cast<std::size_t>(e)];
    if (!edge) throw Error(ErrorCode::NotAPath, "no edge " + std::to_string(from) + " -> " + std::to_string(to));
    if (edge->label == kIdentityLabel) {
      in_tail = true;
      continue;
    }
    if (in_tail) throw Error(ErrorCode::NotAPath, "letter after the 0 tail");
    w.push_back(edge->label);
  }
  return w;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json shells_json = nlohmann::json::array();
  for (const auto& s : shells)
    shells_json.push_back({{"n", s.n},
                           {"paths", s.paths},
                           {"shell", s.shell},
                           {"match", s.match},
                           {"injective", s.injective},
                           {"geodesic", s.geodesic}});
  return {{"group", group},
          {"radius", radius},
          {"passed", passed},
          {"first_failure", first_failure < 0 ? nlohmann::json(nullptr) : nlohmann::json(first_failure)},
          {"shells", shells_json}};
}

namespace {

class NormalFormOracle {
 public:
  explicit NormalFormOracle(const GroupSpec& group) : group_(group), alphabet_(group.alphabet()) {
    if (group.kind == GroupSpec::Kind::surface) surface_.emplace(group.param);
  }

  bool geodesic(const Word& w) const {
    if (!is_freely_reduced(w, alphabet_)) return false;
    return !surface_ || surface_->dehn_reduce(w).size() == w.size();
  }

  Word canonical(const Word& w) const { return surface_ ? surface_->normal_form(w) : free_reduce(w, alphabet_); }

  /// Distinct group elements of length exactly n among all reduced words of length n.
  std::uint64_t shell(int n) const {
    std::set<Word> elements;
    Word w;
    enumerate(w, n, [&](const Word& word) {
      const Word nf = canonical(word);
      if (static_cast<int>(nf.size()) == n) elements.insert(nf);
    });
    return elements.size();
  }

  template <class F>
  void enumerate(Word& w, int n, F&& f) const {
    if (static_cast<int>(w.size()) == n) {
      f(w);
      return;
    }
    for (Letter x = 0; x < static_cast<Letter>(alphabet_.size()); ++x) {
      if (!w.empty() && alphabet_.inverse(w.back()) == x) continue;
      w.push_back(x);
      enumerate(w, n, f);
      w.pop_back();
    }
  }

 private:
  GroupSpec group_;
  Alphabet alphabet_;
  std::optional<SurfacePresentation> surface_;
};

}  // namespace

VerificationReport verify_bijection(const MarkovAutomaton& m, int radius, std::uint64_t budget) {
  if (!m.group()) throw Error(ErrorCode::InvalidArgument, "automaton has no group to verify against");
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "radius must be >= 0");
  const GroupSpec group = *m.group();
  const auto k = static_cast<double>(group.alphabet().size());
  double words = 1.0;
  for (int n = 1; n <= radius; ++n) words += k * std::pow(k - 1.0, n - 1);
  if (words > static_cast<double>(budget))
    throw Error(ErrorCode::RadiusTooLarge, "radius " + std::to_string(radius) + " needs ~" +
                                               std::to_string(static_cast<std::uint64_t>(words)) + " words");

  const NormalFormOracle oracle(group);
  VerificationReport report;
  report.group = group.describe();
  report.radius = radius;

  // Words spelled by 0-free *-paths, grouped by length.
  std::vector<std::vector<Word>> spelled(static_cast<std::size_t>(radius) + 1);
  std::uint64_t visited = 0;
  Word w;
  auto dfs = [&](auto&& self, int v) -> void {
    if (++visited > budget) throw Error(ErrorCode::RadiusTooLarge, "path enumeration exceeded budget");
    spelled[w.size()].push_back(w);
    if (static_cast<int>(w.size()) == radius) return;
    for (int e : m.out(v)) {
      const Edge& edge = m.edges()[static_cast<std::size_t>(e)];
      if (edge.label == kIdentityLabel) continue;
      w.push_back(edge.label);
      self(self, edge.to);
      w.pop_back();
    }
  };
  dfs(dfs, m.start());

  for (int n = 0; n <= radius; ++n) {
    ShellCheck s;
    s.n = n;
    const auto& words_n = spelled[static_cast<std::size_t>(n)];
    s.paths = words_n.size();
    s.shell = n == 0 ? 1 : oracle.shell(n);
    s.geodesic = std::all_of(words_n.begin(), words_n.end(), [&](const Word& x) { return oracle.geodesic(x); });
    std::set<Word> elements;
    for (const auto& x : words_n) elements.insert(oracle.canonical(x));
    s.injective = elements.size() == words_n.size();
    s.match = s.paths == s.shell;
    const bool ok = s.match && s.injective && s.geodesic;
    if (!ok && report.passed) {
      report.passed = false;
      report.first_failure = n;
    }
    report.shells.push_back(s);
  }
  return report;
}

nlohmann::json automaton_to_json(const MarkovAutomaton& m) {
  nlohmann::json j;
  const Alphabet& a = m.alphabet();
  j["alphabet"] = nlohmann::json::array();
  for (std::size_t i = 0; i < a.size(); ++i)
    j["alphabet"].push_back({{"name", a.names()[i]}, {"inverse", a.name(a.inverse(static_cast<Letter>(i)))}});
  j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < m.size(); ++v) {
    const auto& vx = m.vertices()[v];
    j["vertices"].push_back({{"id", v}, {"name", vx.name}, {"initial", vx.initial}, {"zero", vx.zero}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : m.edges())
    j["edges"].push_back({{"from", e.from},
                          {"to", e.to},
                          {"label", e.label == kIdentityLabel ? std::string(kIdentityToken) : a.name(e.label)}});
  j["augmented"] = m.augmented();
  if (m.group())
    j["group"] = {{m.group()->kind == GroupSpec::Kind::free ? "free" : "surface", m.group()->param}};
  return j;
}

MarkovAutomaton automaton_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::string> names;
    for (const auto& x : j.at("alphabet")) names.push_back(x.at("name").get<std::string>());
    std::vector<Letter> inverse;
    for (const auto& x : j.at("alphabet")) {
      const auto inv = x.at("inverse").get<std::string>();
      const auto it = std::find(names.begin(), names.end(), inv);
      if (it == names.end()) throw Error(ErrorCode::InvalidConfig, "unknown inverse letter '" + inv + "'");
      inverse.push_back(static_cast<Letter>(it - names.begin()));
    }
    Alphabet alphabet(names, inverse);

    std::vector<Vertex> vertices(j.at("vertices").size());
    std::vector<bool> filled(vertices.size(), false);
    for (const auto& x : j.at("vertices")) {
      const auto id = x.at("id").get<std::size_t>();
      if (id >= vertices.size() || filled[id]) throw Error(ErrorCode::InvalidConfig, "bad vertex id");
      filled[id] = true;
      vertices[id] = {x.at("name").get<std::string>(), x.value("initial", false), x.value("zero", false)};
    }
    std::vector<Edge> edges;
    for (const auto& x : j.at("edges")) {
      const auto label = x.at("label").get<std::string>();
      Letter l = kIdentityLabel;
      if (label != kIdentityToken) {
        l = alphabet.find(label);
        if (l < 0) throw Error(ErrorCode::InvalidConfig, "unknown edge label '" + label + "'");
      }
      edges.push_back({x.at("from").get<int>(), x.at("to").get<int>(), l});
    }

    std::optional<GroupSpec> group;
    if (j.contains("group")) {
      const auto& g = j.at("group");
      if (g.contains("free")) group = GroupSpec::free_group(g.at("free").get<int>());
      else if (g.contains("surface")) group = GroupSpec::surface_group(g.at("surface").get<int>());
      else throw Error(ErrorCode::InvalidConfig, "group must be {\"free\":k} or {\"surface\":g}");
      if (!(group->alphabet() == alphabet)) throw Error(ErrorCode::InvalidConfig, "alphabet does not match group");
    } else if (alphabet.size() >= 2 && alphabet == Alphabet::free(static_cast<int>(alphabet.size() / 2))) {
      group = GroupSpec::free_group(static_cast<int>(alphabet.size() / 2));
    } else if (alphabet.size() % 4 == 0 && alphabet == Alphabet::surface(static_cast<int>(alphabet.size() / 4))) {
      group = GroupSpec::surface_group(static_cast<int>(alphabet.size() / 4));
    }
    return MarkovAutomaton(std::move(alphabet), group, std::move(vertices), std::move(edges),
                           j.at("augmented").get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("automaton JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::InvalidConfig, e.what());
    throw;
  }
}

MarkovAutomaton read_automaton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
  return automaton_from_json(j);
}

void write_automaton(const MarkovAutomaton& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << automaton_to_json(m).dump(2) << "\n";
}

}  // namespace psclt
