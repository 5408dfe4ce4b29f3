#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psclt/group.hpp"

namespace psclt {

struct Vertex {
  std::string name;
  bool initial = false;
  bool zero = false;
};

struct Edge {
  int from = 0;
  int to = 0;
  Letter label = kIdentityLabel;
};

/// Labeled digraph with initial vertex * and, once augmented, the sink 0.
/// Vertex order is stable: * first, 0 last.
class MarkovAutomaton {
 public:
  MarkovAutomaton() = default;
  MarkovAutomaton(Alphabet alphabet, std::optional<GroupSpec> group, std::vector<Vertex> vertices,
                  std::vector<Edge> edges, bool augmented);

  const Alphabet& alphabet() const { return alphabet_; }
  const std::optional<GroupSpec>& group() const { return group_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool augmented() const { return augmented_; }

  std::size_t size() const { return vertices_.size(); }
  int start() const { return 0; }
  int zero() const { return augmented_ ? static_cast<int>(vertices_.size()) - 1 : -1; }
  /// Edge indices leaving v, in insertion order.
  const std::vector<int>& out(int v) const { return out_.at(static_cast<std::size_t>(v)); }
  /// Target of the letter-labeled edge from v, or -1.
  int next(int v, Letter x) const;
  bool has_edge(int from, int to) const;

 private:
  Alphabet alphabet_;
  std::optional<GroupSpec> group_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  bool augmented_ = false;
  std::vector<std::vector<int>> out_;
};

MarkovAutomaton build_free_automaton(int rank);
MarkovAutomaton build_surface_automaton(int genus);
MarkovAutomaton build_automaton(const GroupSpec& group);
MarkovAutomaton augment(const MarkovAutomaton& m);

/// Vertex sequence of a path starting at *.
using Path = std::vector<int>;

Path encode(const MarkovAutomaton& m, const Word& w);
Word decode(const MarkovAutomaton& m, const Path& p);

struct ShellCheck {
  int n = 0;
  std::uint64_t paths = 0;
  std::uint64_t shell = 0;
  bool match = false;
  bool injective = false;
  bool geodesic = false;
};

struct VerificationReport {
  std::string group;
  int radius = 0;
  std::vector<ShellCheck> shells;
  bool passed = true;
  int first_failure = -1;  // n of the first failing shell

  nlohmann::json to_json() const;
};

/// Exhaustive comparison of *-paths against an independent normal-form
/// enumerator (free reduction or Dehn's algorithm) for every n <= radius.
VerificationReport verify_bijection(const MarkovAutomaton& m, int radius, std::uint64_t budget = 20000000);

nlohmann::json automaton_to_json(const MarkovAutomaton& m);
MarkovAutomaton automaton_from_json(const nlohmann::json& j);
MarkovAutomaton read_automaton(const std::string& path);
void write_automaton(const MarkovAutomaton& m, const std::string& path);

}  // namespace psclt
