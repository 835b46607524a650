#pragma once

#include <optional>

#include "ome/core/dataset.hpp"
#include "ome/core/rng.hpp"

namespace ome::dgp {

// Synthetic data-generating process on x ~ U(-1, 1) with sinusoidal target
// class probability functions, one per treatment arm, and a linear
// propensity. Per-arm proxy outcomes are class-conditional flips of the
// target outcomes.
struct SyntheticConfig {
  std::size_t n = 0;
  ErrorParams error0;
  ErrorParams error1;
  RngSeed seed = 0;
  // Treatment assignment: pi(x) (default) or a constant (randomized trial).
  std::optional<double> constant_propensity;
  // Ceiling applied to each arm's target class probability. 1.0 leaves the
  // functions as defined; 0.85 breaks the max anchor while keeping the min.
  double target_scale_0 = 1.0;
  double target_scale_1 = 1.0;

  void validate() const;
};

// Target class probability eta*_t(x) for x in [-1, 1]. Arm 0 is a piecewise
// sinusoid, arm 1 a single sinusoid; both attain 0 and 1 on the support.
// Result clamped to [0, 1]. Throws DataError outside the domain.
double eval_target_probability(int t, double x);

// Propensity pi(x) = 0.35*x + 0.5 for x in [-1, 1]; range [0.15, 0.85].
double eval_propensity(double x);

// Draws a dataset with full oracle columns:
//   X ~ U(-1,1);  Y*_t ~ Bern(scale_t * eta*_t(X));
//   Y_t = flip of Y*_t with rates (alpha_t, beta_t);  T ~ Bern(pi(X));
//   y by consistency. Bit-identical for equal configs.
Dataset sample_synthetic(const SyntheticConfig& cfg);

}  // namespace ome::dgp
