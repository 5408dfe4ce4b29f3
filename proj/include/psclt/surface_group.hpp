#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "psclt/group.hpp"

namespace psclt {

/// The one-relator presentation <a1,b1,...,ag,bg | [a1,b1]...[ag,bg]>.
class SurfacePresentation {
 public:
  explicit SurfacePresentation(int genus);

  int genus() const { return genus_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const Word& relator() const { return relator_; }
  /// All cyclic conjugates of the relator and of its inverse (8g words).
  const std::vector<Word>& cyclic_relators() const { return cyclic_; }

  /// Dehn's algorithm: strip pieces longer than half a relator, free-reduce, repeat.
  Word dehn_reduce(const Word& w) const;
  bool is_identity(const Word& w) const { return dehn_reduce(w).empty(); }
  bool equal(const Word& u, const Word& v) const;

  /// Dehn reduction followed by exploration of half-relator swaps; returns the
  /// shortlex-least word of minimal length found. Throws BudgetExceeded when
  /// the swap closure exceeds `budget` words.
  Word normal_form(const Word& w, std::size_t budget = 200000) const;

 private:
  int genus_;
  Alphabet alphabet_;
  Word relator_;
  std::vector<Word> cyclic_;
};

/// Faithful numerical model of the surface group: side pairings of the regular
/// hyperbolic 4g-gon acting on the Poincare disk, as SU(1,1) matrices.
class FuchsianModel {
 public:
  using Complex = std::complex<double>;
  struct Matrix {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
  };  // [[alpha, beta], [conj(beta), conj(alpha)]]

  explicit FuchsianModel(int genus);

  const Matrix& generator(Letter x) const { return gens_.at(static_cast<std::size_t>(x)); }
  Matrix evaluate(const Word& w) const;
  static Matrix multiply(const Matrix& a, const Matrix& b);
  /// Hyperboloid coordinates of the orbit point of the disk center.
  static std::array<double, 3> orbit_point(const Matrix& m);
  /// Minimal translation between distinct orbit points (twice the inradius).
  double orbit_separation() const { return separation_; }

 private:
  std::vector<Matrix> gens_;
  double separation_;
};

/// Deterministic automaton over an alphabet: transitions[state][letter] = next
/// state or -1. State 0 is the start state; all states accept.
struct WordAcceptor {
  std::size_t alphabet_size = 0;
  std::vector<std::vector<int>> transitions;

  std::size_t state_count() const { return transitions.size(); }
  bool accepts(const Word& w) const;
};

WordAcceptor minimize(const WordAcceptor& dfa);

struct ShortlexBuildOptions {
  int ball_radius = 5;  // radius of the ball harvested for shortlex equations
};

/// Shortlex geodesic acceptor of the surface group. The word differences of
/// the equations u.x = nf(u.x) inside the ball give a finite difference set;
/// the acceptor is the minimized subset construction over it. Throws CodingBug
/// when a difference leaves the ball.
WordAcceptor build_surface_shortlex_acceptor(int genus, const ShortlexBuildOptions& options = {});

}  // namespace psclt
