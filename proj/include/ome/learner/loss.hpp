#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ome/core/dataset.hpp"

namespace ome::learner {

enum class BaseLossKind { BinaryCrossEntropy, Squared };

// Predictions are clamped to [kProbEps, 1 - kProbEps] inside the loss so
// extreme outputs stay finite.
inline constexpr double kProbEps = 1e-7;

// Propensities are clamped to [kPropensityEps, 1 - kPropensityEps] before
// weighting to bound the weights under strong selection bias.
inline constexpr double kPropensityEps = 0.01;

double base_loss(BaseLossKind kind, double f, std::uint8_t y);

// Unbiased surrogate: the linear recombination of base losses whose
// expectation over proxy labels equals the base loss over target labels,
//   loss~(f, 1) = ((1-a) l(f,1) - b l(f,0)) / (1-a-b)
//   loss~(f, 0) = ((1-b) l(f,0) - a l(f,1)) / (1-a-b).
// May be negative; never clipped (clipping would break the unbiasedness).
double surrogate_loss(const ErrorParams& e, BaseLossKind kind, double f,
                      std::uint8_t y);

// Coefficients (on l(f,1) and l(f,0)) of the label-y loss row; identity when
// no correction is present.
struct LossCoeffs {
  double on_pos = 0.0;
  double on_neg = 0.0;
};
LossCoeffs loss_coeffs(const std::optional<ErrorParams>& e, std::uint8_t y);

// Inverse-propensity weight w(x) = p(T=t) / ((2t-1) pi(x) + 1 - t), i.e.
// p_t/pi for the treated arm and p_t/(1-pi) for control. pi is clamped.
double ipw_weight(int t, double p_t, double pi_x);

// What train() minimizes: base loss kind, optional surrogate correction,
// optional per-row weights (parallel to the row set; empty means all ones).
struct LossSpec {
  BaseLossKind base = BaseLossKind::BinaryCrossEntropy;
  std::optional<ErrorParams> surrogate;
  std::vector<double> weights;

  void validate(std::size_t n_rows) const;
};

}  // namespace ome::learner
