#include "ome/learner/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ome::learner {

double base_loss(BaseLossKind kind, double f, std::uint8_t y) {
  const double fc = std::clamp(f, kProbEps, 1.0 - kProbEps);
  switch (kind) {
    case BaseLossKind::BinaryCrossEntropy:
      return y ? -std::log(fc) : -std::log(1.0 - fc);
    case BaseLossKind::Squared: {
      const double d = fc - (y ? 1.0 : 0.0);
      return d * d;
    }
  }
  return 0.0;
}

LossCoeffs loss_coeffs(const std::optional<ErrorParams>& e, std::uint8_t y) {
  if (!e) return y ? LossCoeffs{1.0, 0.0} : LossCoeffs{0.0, 1.0};
  const double d = 1.0 - e->alpha - e->beta;
  if (y) return {(1.0 - e->alpha) / d, -e->beta / d};
  return {-e->alpha / d, (1.0 - e->beta) / d};
}

double surrogate_loss(const ErrorParams& e, BaseLossKind kind, double f,
                      std::uint8_t y) {
  e.validate("surrogate loss");
  const LossCoeffs c = loss_coeffs(e, y);
  return c.on_pos * base_loss(kind, f, 1) + c.on_neg * base_loss(kind, f, 0);
}

double ipw_weight(int t, double p_t, double pi_x) {
  const double pi = std::clamp(pi_x, kPropensityEps, 1.0 - kPropensityEps);
  const double denom = t ? pi : 1.0 - pi;
  return p_t / denom;
}

void LossSpec::validate(std::size_t n_rows) const {
  if (surrogate) surrogate->validate("loss surrogate correction");
  if (!weights.empty()) {
    if (weights.size() != n_rows) {
      throw ConfigError("loss weights: " + std::to_string(weights.size()) +
                        " entries for " + std::to_string(n_rows) + " rows");
    }
    double sum = 0.0;
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw ConfigError("loss weights must be positive and finite");
      }
      sum += w;
    }
    if (!std::isfinite(sum / weights.size())) {
      throw ConfigError("loss weights have a non-finite mean");
    }
  }
}

}  // namespace ome::learner
