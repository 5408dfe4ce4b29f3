#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psclt/automaton.hpp"
#include "psclt/rational.hpp"

namespace psclt {

/// Nonnegative integer matrix indexed by automaton vertices. The prime variant
/// drops the 0 row and column.
struct TransitionMatrix {
  enum class Variant { full, prime };
  Variant variant = Variant::full;
  std::size_t n = 0;
  std::vector<std::int64_t> a;  // row-major
  std::vector<int> vertex;      // row index -> automaton vertex id

  TransitionMatrix() = default;
  explicit TransitionMatrix(const std::vector<std::vector<std::int64_t>>& rows);

  std::int64_t operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  std::int64_t row_sum(std::size_t i) const;
  RationalMatrix to_rational() const;
};

TransitionMatrix transition_matrix(const MarkovAutomaton& m, TransitionMatrix::Variant variant);

struct GrowthRate {
  double lambda = 0.0;
  double residual = 0.0;  // Collatz-Wielandt gap relative to lambda
  bool elementary = false;
  std::vector<std::string> warnings;
};

/// Spectral radius as the largest radius over strongly connected components.
GrowthRate growth_rate(const TransitionMatrix& t);

struct Component {
  std::vector<int> vertices;  // matrix indices, ascending
  double radius = 0.0;
  bool maximal = false;
};

struct ComponentDecomposition {
  std::vector<Component> components;  // ordered by smallest vertex
  std::vector<int> component_of;
  std::vector<std::vector<bool>> reaches;  // reaches[i][j]: a path from component i into j, i != j

  std::vector<int> maximal() const;
  bool in_maximal(int v) const { return components[static_cast<std::size_t>(component_of[static_cast<std::size_t>(v)])].maximal; }
};

/// Spectral radius of the irreducible block on `vertices`.
double component_radius(const TransitionMatrix& t, const std::vector<int>& vertices);

ComponentDecomposition decompose(const TransitionMatrix& t, double lambda, bool group_coding);

struct CesaroResult {
  std::vector<double> value;
  double residual = 0.0;  // max |A x - lambda x|
};

/// (1/(n+1)) sum_{k<=n} A^k v / lambda^k, or with A^T when transpose is set.
CesaroResult cesaro_project(const TransitionMatrix& t, const std::vector<double>& v, double lambda, int n,
                            bool transpose = false);

enum class Arithmetic { rational, floating };

struct ExactSpectral {
  Rational lambda;
  std::vector<Rational> p_one;
  std::vector<Rational> r_vstar;
};

struct SpectralData {
  double lambda = 0.0;
  std::vector<double> p_one;
  std::vector<double> r_vstar;
  int cesaro_steps = 0;
  double residual = 0.0;
  std::optional<ExactSpectral> exact;
};

/// p(1) and r(v_*) on the full matrix. Rational arithmetic requires a rational lambda.
SpectralData spectral_data(const TransitionMatrix& t, const ComponentDecomposition& c, double lambda, int start,
                           Arithmetic arithmetic);

struct ExactMeasure {
  RationalMatrix N;
  std::vector<Rational> rho;
  std::vector<Rational> alpha;
};

struct MarkovMeasure {
  std::size_t n = 0;
  std::vector<double> N;  // row-major, row-stochastic
  std::vector<double> rho;
  std::vector<double> alpha;  // per maximal component, in decomposition order
  std::optional<ExactMeasure> exact;

  double operator()(std::size_t i, std::size_t j) const { return N[i * n + j]; }
};

MarkovMeasure build_markov_measure(const TransitionMatrix& t, const SpectralData& s, const ComponentDecomposition& c);

/// Everything downstream needs about one coding: augmented automaton, A, components, spectrum, measure.
struct CodingModel {
  MarkovAutomaton automaton;
  TransitionMatrix a;
  TransitionMatrix a_prime;
  GrowthRate growth;
  ComponentDecomposition components;
  SpectralData spectrum;
  MarkovMeasure measure;

  bool exact() const { return spectrum.exact.has_value(); }
  int start() const { return automaton.start(); }
};

/// Augments when needed. Rational arithmetic falls back to float when lambda is irrational.
CodingModel analyze(const MarkovAutomaton& m, Arithmetic arithmetic, bool group_coding = true);

nlohmann::json spectrum_to_json(const CodingModel& model);

}  // namespace psclt
