#include "psclt/fixtures.hpp"

namespace psclt {

namespace {

// Appends a copy of the rank-2 letter graph; returns the index of its v_a vertex.
int add_letter_block(const Alphabet& alphabet, const std::string& tag, std::vector<Vertex>& vertices,
                     std::vector<Edge>& edges) {
  const int base = static_cast<int>(vertices.size());
  for (const auto& name : alphabet.names()) vertices.push_back({tag + name, false, false});
  const auto k = static_cast<Letter>(alphabet.size());
  for (Letter x = 0; x < k; ++x)
    for (Letter y = 0; y < k; ++y)
      if (y != alphabet.inverse(x)) edges.push_back({base + x, base + y, y});
  return base;
}

}  // namespace

MarkovAutomaton two_block_fixture(bool connected) {
  const Alphabet alphabet = Alphabet::free(2);
  std::vector<Vertex> vertices{{"*", true, false}};
  std::vector<Edge> edges;
  const int first = add_letter_block(alphabet, "L_", vertices, edges);
  const int second = add_letter_block(alphabet, "R_", vertices, edges);
  edges.push_back({0, first + 0, 0});   // a
  edges.push_back({0, first + 1, 1});   // A
  edges.push_back({0, second + 2, 2});  // b
  edges.push_back({0, second + 3, 3});  // B
  if (connected) edges.push_back({first + 0, second + 1, 1});
  return MarkovAutomaton(alphabet, std::nullopt, std::move(vertices), std::move(edges), false);
}

MarkovAutomaton transient_chain_fixture() {
  const Alphabet alphabet = Alphabet::free(2);
  std::vector<Vertex> vertices{{"*", true, false}, {"c1", false, false}, {"c2", false, false}, {"c3", false, false},
                               {"t1", false, false}, {"t2", false, false}};
  std::vector<Edge> edges{{0, 1, 0}, {1, 2, 0}, {2, 3, 0}};
  const int block = add_letter_block(alphabet, "M_", vertices, edges);
  edges.push_back({3, block + 0, 0});
  edges.push_back({3, 4, 2});
  for (int t : {4, 5}) {
    edges.push_back({t, 4, 0});
    edges.push_back({t, 5, 2});
    edges.push_back({t, block + 2, 1});
  }
  return MarkovAutomaton(alphabet, std::nullopt, std::move(vertices), std::move(edges), false);
}

}  // namespace psclt
