#include "ome/measurement/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ome::measurement {

double proxy_probability(double eta_star, const ErrorParams& e) {
  return (1.0 - e.beta) * eta_star + e.alpha * (1.0 - eta_star);
}

Mat2 forward_matrix(const ErrorParams& e) {
  return {1.0 - e.alpha, e.alpha, e.beta, 1.0 - e.beta};
}

Mat2 inverse_correction(const ErrorParams& e) {
  const double det = 1.0 - e.alpha - e.beta;
  if (det <= 0.0) {
    throw IdentificationError(
        "error model is singular: alpha + beta = " + std::to_string(e.alpha + e.beta) +
        " >= 1");
  }
  return {(1.0 - e.beta) / det, -e.alpha / det, -e.beta / det, (1.0 - e.alpha) / det};
}

ConfusionRates confusion_against(std::span<const std::uint8_t> y_ref,
                                 std::span<const std::uint8_t> y) {
  std::size_t pos = 0, neg = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_ref.size(); ++i) {
    if (y_ref[i]) {
      ++pos;
      fn += !y[i];
    } else {
      ++neg;
      fp += y[i];
    }
  }
  if (pos == 0 || neg == 0) {
    throw DataError("slice lacks a reference class: cannot compute fpr/fnr (" +
                    std::to_string(pos) + " positives, " + std::to_string(neg) +
                    " negatives)");
  }
  return {static_cast<double>(fp) / neg, static_cast<double>(fn) / pos,
          y_ref.size()};
}

std::vector<ConfusionRates> empirical_error_rates(const Dataset& ds, Slice slice) {
  if (!ds.has_oracle_targets()) {
    throw DataError("empirical_error_rates requires target columns");
  }
  BinaryColumn ref(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) ref[i] = ds.factual_target(i);

  if (slice == Slice::All) {
    return {confusion_against(ref, ds.y)};
  }
  std::vector<ConfusionRates> out;
  for (int arm = 0; arm < 2; ++arm) {
    BinaryColumn r, p;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.t[i] == arm) {
        r.push_back(ref[i]);
        p.push_back(ds.y[i]);
      }
    }
    out.push_back(confusion_against(r, p));
  }
  return out;
}

BinaryColumn threshold_at_percentile(std::span<const double> scores, double q) {
  if (scores.empty()) throw DataError("cannot threshold an empty score column");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ConfigError("percentile must lie in [0, 1]");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = std::min(
      sorted.size() - 1, static_cast<std::size_t>(q * (sorted.size() - 1) + 0.5));
  const double cut = sorted[idx];
  BinaryColumn out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > cut ? 1 : 0;
  return out;
}

}  // namespace ome::measurement
