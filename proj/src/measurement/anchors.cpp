#include "ome/measurement/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ome::measurement {

namespace {

ErrorParams checked(double alpha, double beta) {
  const ErrorParams e{alpha, beta};
  if (!e.valid()) {
    throw IdentificationError(
        "identified parameters (alpha=" + std::to_string(alpha) +
        ", beta=" + std::to_string(beta) +
        ") are invalid; an anchor assumption is likely violated");
  }
  return e;
}

bool is_known(AnchorType t) {
  return t == AnchorType::KnownAlpha || t == AnchorType::KnownBeta;
}

}  // namespace

void AnchorSpec::validate() const {
  const bool needs_value = type == AnchorType::BaseRate || is_known(type);
  if (needs_value) {
    if (!value) {
      throw ConfigError("anchor '" + anchor_name(type) + "' requires a value");
    }
    if (!(*value >= 0.0 && *value <= 1.0)) {
      throw ConfigError("anchor '" + anchor_name(type) + "' value " +
                        std::to_string(*value) + " outside [0, 1]");
    }
  }
}

std::string anchor_name(AnchorType type) {
  switch (type) {
    case AnchorType::Min: return "min";
    case AnchorType::Max: return "max";
    case AnchorType::BaseRate: return "base_rate";
    case AnchorType::KnownAlpha: return "known_alpha";
    case AnchorType::KnownBeta: return "known_beta";
  }
  return "?";
}

AnchorType anchor_from_name(const std::string& name) {
  if (name == "min") return AnchorType::Min;
  if (name == "max") return AnchorType::Max;
  if (name == "base_rate" || name == "br") return AnchorType::BaseRate;
  if (name == "known_alpha") return AnchorType::KnownAlpha;
  if (name == "known_beta") return AnchorType::KnownBeta;
  throw ConfigError("unknown anchor kind: " + name);
}

bool check_identifiable(AnchorType a, AnchorType b) {
  if (a == b) return false;
  // Min pins c_star = 0, which is degenerate for the known-alpha form;
  // Max pins c_star = 1, degenerate for the known-beta form.
  if (a == AnchorType::KnownAlpha || b == AnchorType::KnownAlpha) {
    const AnchorType other = a == AnchorType::KnownAlpha ? b : a;
    if (other == AnchorType::Min) return false;
  }
  if (a == AnchorType::KnownBeta || b == AnchorType::KnownBeta) {
    const AnchorType other = a == AnchorType::KnownBeta ? b : a;
    if (other == AnchorType::Max) return false;
  }
  return true;
}

namespace {

ErrorParams solve_from_anchors(const AnchorPoint& pi, const AnchorPoint& pj) {
  const double denom = pi.c_star - pj.c_star;
  if (denom == 0.0) {
    throw IdentificationError(
        "degenerate anchors: both pin the target probability at " +
        std::to_string(pi.c_star));
  }
  const double alpha = (pi.c_star * pj.c - pi.c * pj.c_star) / denom;
  const double beta = (pi.c * pj.c_star - pi.c + pi.c_star - pj.c_star + pj.c -
                       pi.c_star * pj.c) /
                      denom;
  return {alpha, beta};
}

ErrorParams solve_with_known_alpha(double alpha, const AnchorPoint& p) {
  if (p.c_star == 0.0) {
    throw IdentificationError(
        "anchor with c_star = 0 cannot identify beta from a known alpha");
  }
  return {alpha, (p.c_star - p.c + alpha * (1.0 - p.c_star)) / p.c_star};
}

ErrorParams solve_with_known_beta(double beta, const AnchorPoint& p) {
  if (p.c_star == 1.0) {
    throw IdentificationError(
        "anchor with c_star = 1 cannot identify alpha from a known beta");
  }
  return {(p.c - (1.0 - beta) * p.c_star) / (1.0 - p.c_star), beta};
}

}  // namespace

ErrorParams identify_from_anchors(const AnchorPoint& pi, const AnchorPoint& pj) {
  const ErrorParams e = solve_from_anchors(pi, pj);
  return checked(e.alpha, e.beta);
}

ErrorParams identify_with_known_alpha(double alpha, const AnchorPoint& p) {
  const ErrorParams e = solve_with_known_alpha(alpha, p);
  return checked(e.alpha, e.beta);
}

ErrorParams identify_with_known_beta(double beta, const AnchorPoint& p) {
  const ErrorParams e = solve_with_known_beta(beta, p);
  return checked(e.alpha, e.beta);
}

namespace {

double quantile_of(std::span<const double> values, double q) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
  return sorted[idx];
}

}  // namespace

AnchorPoint anchor_to_point(const AnchorSpec& spec,
                            std::span<const double> inferences,
                            const AnchorExtraction& extraction) {
  spec.validate();
  if (inferences.empty()) {
    throw DataError("anchor_to_point: empty inference list");
  }
  switch (spec.type) {
    case AnchorType::Min:
      return {0.0, extraction.lower_quantile <= 0.0
                       ? *std::min_element(inferences.begin(), inferences.end())
                       : quantile_of(inferences, extraction.lower_quantile)};
    case AnchorType::Max:
      return {1.0, extraction.upper_quantile >= 1.0
                       ? *std::max_element(inferences.begin(), inferences.end())
                       : quantile_of(inferences, extraction.upper_quantile)};
    case AnchorType::BaseRate: {
      const double mean =
          std::accumulate(inferences.begin(), inferences.end(), 0.0) /
          static_cast<double>(inferences.size());
      return {*spec.value, mean};
    }
    case AnchorType::KnownAlpha:
    case AnchorType::KnownBeta:
      throw ConfigError("known-parameter anchors carry no anchor point");
  }
  throw ConfigError("unreachable anchor kind");
}

ErrorParams identify_raw(const AnchorSpec& a, const AnchorSpec& b,
                         std::span<const double> inferences,
                         const AnchorExtraction& extraction) {
  a.validate();
  b.validate();
  if (!check_identifiable(a.type, b.type)) {
    throw IdentificationError("anchor pair (" + anchor_name(a.type) + ", " +
                              anchor_name(b.type) +
                              ") does not identify the error parameters");
  }
  const bool a_known = is_known(a.type);
  const bool b_known = is_known(b.type);
  if (a_known && b_known) {
    const double alpha =
        a.type == AnchorType::KnownAlpha ? *a.value : *b.value;
    const double beta = a.type == AnchorType::KnownBeta ? *a.value : *b.value;
    return {alpha, beta};
  }
  if (a_known || b_known) {
    const AnchorSpec& known = a_known ? a : b;
    const AnchorSpec& anchored = a_known ? b : a;
    const AnchorPoint p = anchor_to_point(anchored, inferences, extraction);
    return known.type == AnchorType::KnownAlpha
               ? solve_with_known_alpha(*known.value, p)
               : solve_with_known_beta(*known.value, p);
  }
  return solve_from_anchors(anchor_to_point(a, inferences, extraction),
                            anchor_to_point(b, inferences, extraction));
}

ErrorParams identify(const AnchorSpec& a, const AnchorSpec& b,
                     std::span<const double> inferences,
                     const AnchorExtraction& extraction) {
  const ErrorParams e = identify_raw(a, b, inferences, extraction);
  return checked(e.alpha, e.beta);
}

}  // namespace ome::measurement
