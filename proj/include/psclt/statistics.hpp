#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psclt/kernels.hpp"
#include "psclt/measures.hpp"
#include "psclt/observables.hpp"

namespace psclt {

/// Law of phi(gamma_n) under the boundary measure on the lattice (offset + i) * quantum.
struct ExactDistribution {
  int n = 0;
  std::int64_t offset = 0;
  double quantum = 1.0;
  std::vector<double> probabilities;
  std::optional<std::vector<Rational>> exact;

  double value(std::size_t i) const { return static_cast<double>(offset + static_cast<std::int64_t>(i)) * quantum; }
  double mean() const;
};

struct DpOptions {
  bool parallel = false;
  int workers = 1;
  bool rational = false;  // exact rational DP, serial; needs an exact model
  std::size_t budget = 50000000;  // states x lattice cells
};

ExactDistribution exact_distribution(const EdgePotential& potential, const CodingModel& model, int n,
                                     const DpOptions& options = {});

/// Stationary drift of a window-local observable along the boundary chain.
ExactValue exact_drift(const EdgePotential& potential, const CodingModel& model);

/// Monte Carlo values of phi(gamma_n) for each n in ns, rays x ns row-major.
struct RaySamples {
  std::vector<int> ns;
  std::size_t rays = 0;
  std::vector<double> values;

  std::vector<double> column(std::size_t i) const;
};

/// Uses the edge potential when the observable is window-local, else the displacement accumulator.
RaySamples sample_observable(const CodingModel& model, const Observable& obs, std::vector<int> ns, std::size_t rays,
                             std::uint64_t seed, int workers = 1);

struct DriftEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double spread = 0.0;  // sample standard deviation of phi/n
  std::optional<double> exact;
};

DriftEstimate estimate_drift(const CodingModel& model, const Observable& obs, int n, std::size_t rays,
                             std::uint64_t seed, int workers = 1);
DriftEstimate drift_from_samples(const std::vector<double>& values, int n);

/// Variance of (phi(gamma_n) - n Lambda) / sqrt(n).
double estimate_variance(const ExactDistribution& dist, double lambda);
double estimate_variance(const std::vector<double>& values, int n, double lambda);

/// sup_x |P((phi - n Lambda)/sqrt(n) <= x) - Phi(x / sigma)| over all jump points.
double ks_distance(const ExactDistribution& dist, double lambda, double sigma2);
double ks_distance(std::vector<double> values, int n, double lambda, double sigma2);
/// Kolmogorov distance between an empirical sample and an exact lattice law.
double ks_distance(std::vector<double> values, const ExactDistribution& dist);

/// Total variation between a sample histogram and an exact lattice law.
double total_variation(const std::vector<double>& values, const ExactDistribution& dist);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;  // 95% t interval; equals slope when only two points are used
  std::size_t used = 0;
  std::vector<std::string> warnings;
};

RateFit rate_fit(const std::vector<std::pair<int, double>>& points);

struct DegeneracyVerdict {
  bool degenerate = true;
  std::vector<std::string> prefix;  // letters from * to the cycle
  std::vector<std::string> cycle;   // letters of the witness cycle
  std::vector<int> cycle_states;    // lifted states
  double period_sum = 0.0;          // sum of (f - Lambda) over one period
  double max_cycle_sum = 0.0;       // largest |centered sum| seen
};

/// Looks for a cycle in the lifted maximal components with nonzero centered sum.
/// Short cycles are enumerated first, then a spanning-tree coboundary test decides.
DegeneracyVerdict degeneracy_witness(const EdgePotential& potential, const CodingModel& model, double lambda);

}  // namespace psclt
