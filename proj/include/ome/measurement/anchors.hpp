#pragma once

#include <optional>
#include <span>
#include <string>

#include "ome/core/dataset.hpp"

namespace ome::measurement {

// A point where both the target class probability (c_star) and the proxy
// class probability (c) are known.
struct AnchorPoint {
  double c_star = 0.0;
  double c = 0.0;
};

enum class AnchorType { Min, Max, BaseRate, KnownAlpha, KnownBeta };

// An anchor assumption: the kind plus any supplied constant (the known base
// rate, or the known error parameter).
struct AnchorSpec {
  AnchorType type = AnchorType::Min;
  std::optional<double> value;  // required for BaseRate / KnownAlpha / KnownBeta

  static AnchorSpec min() { return {AnchorType::Min, std::nullopt}; }
  static AnchorSpec max() { return {AnchorType::Max, std::nullopt}; }
  static AnchorSpec base_rate(double v) { return {AnchorType::BaseRate, v}; }
  static AnchorSpec known_alpha(double v) { return {AnchorType::KnownAlpha, v}; }
  static AnchorSpec known_beta(double v) { return {AnchorType::KnownBeta, v}; }

  void validate() const;
};

std::string anchor_name(AnchorType type);
AnchorType anchor_from_name(const std::string& name);

// True exactly for the anchor combinations that identify (alpha, beta):
// every pair of distinct target-probability pins, plus known-parameter
// pairs that avoid the degenerate c_star (known alpha excludes Min,
// known beta excludes Max, equal kinds never identify).
bool check_identifiable(AnchorType a, AnchorType b);

// Solves the two-point linear system of the error model:
//   alpha = (c*_i c_j - c_i c*_j) / (c*_i - c*_j),  beta by the companion
// closed form. Throws IdentificationError on equal c_star (degenerate) or
// when the solution leaves the valid region.
ErrorParams identify_from_anchors(const AnchorPoint& pi, const AnchorPoint& pj);

// Single-parameter forms given one known error rate:
//   known beta:  alpha = (c - (1-beta) c*) / (1 - c*)   (needs c* != 1)
//   known alpha: beta  = (c* - c + alpha (1-c*)) / c*   (needs c* != 0)
ErrorParams identify_with_known_alpha(double alpha, const AnchorPoint& p);
ErrorParams identify_with_known_beta(double beta, const AnchorPoint& p);

// How min/max anchors read the inference sample. The defaults take the
// literal extrema. Robust quantiles counter the two fit artifacts that bias
// anchor statistics: spurious dips below the floor (lower side) and noise
// spikes at the peak (upper side).
struct AnchorExtraction {
  double lower_quantile = 0.0;  // 0 = exact minimum
  double upper_quantile = 1.0;  // 1 = exact maximum
};

// Converts an anchor assumption into a point using model inferences over a
// held-out sample: Min -> (0, min), Max -> (1, max),
// BaseRate(v) -> (v, mean). Throws DataError on an empty inference list and
// ConfigError for known-parameter kinds (they carry no point).
AnchorPoint anchor_to_point(const AnchorSpec& spec,
                            std::span<const double> inferences,
                            const AnchorExtraction& extraction = {});

// Full dispatcher: checks pair identifiability, converts anchors to
// points over `inferences`, and applies the matching closed form.
ErrorParams identify(const AnchorSpec& a, const AnchorSpec& b,
                     std::span<const double> inferences,
                     const AnchorExtraction& extraction = {});

// As identify() but returns the raw closed-form solution without the
// validity check. Cross-fitting averages raw per-ordering solutions and
// validates the average, so sampling wiggle on one ordering does not abort
// the estimate.
ErrorParams identify_raw(const AnchorSpec& a, const AnchorSpec& b,
                         std::span<const double> inferences,
                         const AnchorExtraction& extraction = {});

}  // namespace ome::measurement
