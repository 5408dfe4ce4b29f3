#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "psclt/subshift.hpp"

namespace psclt {

/// Cylinder masses of the boundary measure: mass([y]) = p_{v_y} / p_* * lambda^-|y|.
class CylinderMeasure {
 public:
  explicit CylinderMeasure(const CodingModel& model) : model_(&model) {}

  const CodingModel& model() const { return *model_; }
  bool exact() const { return model_->exact(); }

  double mass(const Path& p) const;
  Rational mass_exact(const Path& p) const;
  /// Row of N at v. Throws NullState when p(1)_v = 0.
  std::vector<double> next_step(int v) const;

 private:
  void check_path(const Path& p) const;
  const CodingModel* model_;
};

/// Per-ray generator stream derived from (master seed, ray index).
std::mt19937_64 ray_stream(std::uint64_t seed, std::uint64_t index);
/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF sampler over the nonzero entries of each row of N.
class ChainSampler {
 public:
  explicit ChainSampler(const MarkovMeasure& measure);

  int step(int v, std::mt19937_64& rng) const;
  int draw_initial(std::mt19937_64& rng) const;

 private:
  std::vector<std::vector<int>> targets_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<int> rho_support_;
  std::vector<double> rho_cumulative_;
};

enum class RayKind { boundary, invariant };

struct RaySample {
  std::uint64_t seed = 0;
  Path path;
  std::vector<std::pair<int, int>> checkpoints;  // (step, vertex)
};

/// Boundary rays start at *, invariant rays draw the start from rho.
/// Checkpoints are recorded every `checkpoint_every` steps (0: only the last step).
RaySample sample_ray(const CodingModel& model, RayKind kind, int length, std::uint64_t seed,
                     int checkpoint_every = 0);

/// Table of the shifted boundary masses nu(sigma^-k [v]) and alpha_v^k for k <= max_k.
struct PushforwardTable {
  int max_k = 0;
  std::size_t n = 0;
  std::vector<double> nu;
  std::vector<double> alpha;
  std::optional<std::vector<Rational>> nu_exact;
  std::optional<std::vector<Rational>> alpha_exact;

  double operator()(int k, int v) const { return alpha[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(v)]; }
  double shifted_mass(int k, int v) const { return nu[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(v)]; }
};

PushforwardTable pushforward_table(const CodingModel& model, int max_k);
double pushforward_coefficient(const CodingModel& model, int k, int v);

struct ExactValue {
  double value = 0.0;
  std::optional<Rational> exact;
};

/// Total variation on depth-1 cylinders between (1/n) sum_{j=0..n} sigma^j nu and mu.
ExactValue cesaro_tv_depth1(const CodingModel& model, int n);
/// Values for n = 1..max_n; entry i holds n = i + 1.
std::vector<ExactValue> cesaro_tv_series(const CodingModel& model, int max_n);

/// Boundary mass of rays still outside every maximal component after n + 1 steps.
ExactValue truncation_tail(const CodingModel& model, int n);

void write_rays_csv(const std::string& path, const CodingModel& model, const std::vector<RaySample>& rays);
void write_series_csv(const std::string& path, const std::vector<std::pair<int, double>>& series);

}  // namespace psclt
