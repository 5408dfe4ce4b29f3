#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psclt/automaton.hpp"

namespace psclt {

struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Mat2 inverse() const { return {d, -b, -c, a}; }  // for det 1
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
};

struct Observable {
  enum class Kind { homomorphism, brooks, weighted_length, schottky_displacement };

  Kind kind = Kind::homomorphism;
  GroupSpec group;
  Alphabet alphabet;
  std::vector<double> weights;  // per letter: homomorphism weights or edge lengths
  Word word;                    // brooks
  std::vector<Mat2> matrices;   // per letter, conjugated so that the origin sits at i
  std::complex<double> origin{0.0, 1.0};
  std::optional<int> window;
  std::optional<double> quantum;
  std::vector<std::string> warnings;

  std::string kind_name() const;
  std::string describe() const;
  nlohmann::json to_json() const;
};

/// Weights may be given per generator (inverse gets the negative) or per letter.
Observable make_homomorphism(const GroupSpec& group, const std::map<std::string, double>& weights);
Observable make_brooks(const GroupSpec& group, const Word& w);
/// Lengths may be given per generator (inverse gets the same length) or per letter.
Observable make_weighted_length(const GroupSpec& group, const std::map<std::string, double>& lengths);
/// Matrices per generator; inverse letters get the inverse matrix unless given.
Observable make_schottky_displacement(const GroupSpec& group, const std::map<std::string, Mat2>& matrices,
                                      std::complex<double> origin);
/// diag(2, 1/2) and the quarter-rotation conjugate of diag(4, 1/4), based at i.
Observable default_schottky();

Observable observable_from_json(const GroupSpec& group, const nlohmann::json& j);

/// Running value of a Schottky displacement along a word, rescaled to avoid overflow.
class DisplacementAccumulator {
 public:
  explicit DisplacementAccumulator(const Observable& obs) : obs_(&obs) {}
  void push(Letter x);
  double value() const;

 private:
  const Observable* obs_;
  Mat2 m_;
  double log_scale_ = 0.0;
};

/// Throws NotGeodesic when w is not in normal form.
double evaluate(const Observable& obs, const Word& w);
double evaluate_unchecked(const Observable& obs, const Word& w);

struct LiftedEdge {
  int to = 0;
  Letter label = 0;
  double weight = 0.0;
  std::int64_t units = 0;  // weight / quantum
};

/// Automaton on (vertex, last `window` letters) with the observable's increments on edges.
struct EdgePotential {
  int window = 1;
  double quantum = 1.0;
  std::vector<int> base;
  std::vector<Word> history;
  std::vector<std::vector<LiftedEdge>> out;

  std::size_t size() const { return base.size(); }
  int start() const { return 0; }
  /// Sum of weights along the lifted path spelling w; throws NotAPath when no path exists.
  double path_sum(const Word& w) const;
  std::string name(const MarkovAutomaton& m, int v) const;
};

EdgePotential window_lift(const MarkovAutomaton& m, const Observable& obs);

struct Condition2Report {
  double left_constant = 0.0;
  double right_constant = 0.0;
  double defect = 0.0;
};

Condition2Report condition2_check(const MarkovAutomaton& m, const Observable& obs, int samples, int length,
                                  std::uint64_t seed);

}  // namespace psclt
