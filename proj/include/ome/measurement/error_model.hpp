#pragma once

#include <array>
#include <span>

#include "ome/core/dataset.hpp"

namespace ome::measurement {

// Forward error model: proxy class probability as an affine map of the
// target class probability,
//   eta = (1 - beta) * eta_star + alpha * (1 - eta_star).
// Strictly monotone increasing in eta_star (slope 1 - alpha - beta > 0);
// output lies in [alpha, 1 - beta].
double proxy_probability(double eta_star, const ErrorParams& e);

// 2x2 row-major matrix; index [r*2 + c].
using Mat2 = std::array<double, 4>;

// Forward confusion matrix T = [[1-a, a], [b, 1-b]] acting on the
// distribution vector (1 - eta_star, eta_star).
Mat2 forward_matrix(const ErrorParams& e);

// Its inverse, (1/(1-a-b)) * [[1-b, -a], [-b, 1-a]]. Throws
// IdentificationError when alpha + beta >= 1 (determinant 1-a-b <= 0).
Mat2 inverse_correction(const ErrorParams& e);

// Empirical false positive / false negative rates of a proxy against a
// reference column within one population slice.
struct ConfusionRates {
  double fpr = 0.0;  // P(y=1 | y_ref=0)
  double fnr = 0.0;  // P(y=0 | y_ref=1)
  std::size_t n = 0;
};

enum class Slice { All, ByTreatment };

// Computes fpr/fnr of ds.y against the factual target. Slice::All returns
// one entry; Slice::ByTreatment returns {t=0 slice, t=1 slice}. Throws
// DataError when a slice lacks a reference class (rates undefined).
std::vector<ConfusionRates> empirical_error_rates(const Dataset& ds, Slice slice);

// As above but against an arbitrary pair of columns; exposed for callers
// holding raw label vectors.
ConfusionRates confusion_against(std::span<const std::uint8_t> y_ref,
                                 std::span<const std::uint8_t> y);

// Binarize a real-valued score column at its q-th percentile (q in [0,1]):
// 1 where score > percentile value. Preprocessing helper for rate
// computation on continuous outcomes.
BinaryColumn threshold_at_percentile(std::span<const double> scores, double q);

}  // namespace ome::measurement
