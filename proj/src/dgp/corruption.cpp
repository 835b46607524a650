#include "ome/dgp/corruption.hpp"

#include <string>

namespace ome::dgp {

Dataset flip_labels(const Dataset& ds, const ErrorParams& e0,
                    const ErrorParams& e1, RngSeed seed) {
  e0.validate("flip_labels error0");
  e1.validate("flip_labels error1");
  if (!ds.has_oracle_targets()) {
    throw DataError("flip_labels requires target columns y_star_0 and y_star_1");
  }

  Rng rng(seed);
  Dataset out = ds;
  out.y_0 = BinaryColumn(ds.n());
  out.y_1 = BinaryColumn(ds.n());
  auto flip = [&](std::uint8_t y_star, const ErrorParams& e) -> std::uint8_t {
    if (y_star) return rng.bernoulli(e.beta) ? 0 : 1;
    return rng.bernoulli(e.alpha) ? 1 : 0;
  };
  for (std::size_t i = 0; i < ds.n(); ++i) {
    (*out.y_0)[i] = flip((*ds.y_star_0)[i], e0);
    (*out.y_1)[i] = flip((*ds.y_star_1)[i], e1);
    out.y[i] = out.t[i] ? (*out.y_1)[i] : (*out.y_0)[i];
  }
  return out;
}

bool SelectionRule::matches(const Dataset& ds, std::size_t row) const {
  if (ds.t[row] != arm) return false;
  const double v = ds.x(row, covariate);
  switch (op) {
    case Op::Greater: return v > threshold;
    case Op::GreaterEq: return v >= threshold;
    case Op::Less: return v < threshold;
    case Op::LessEq: return v <= threshold;
  }
  return false;
}

Dataset inject_selection_bias(const Dataset& ds, const SelectionRule& rule) {
  if (rule.covariate >= ds.dim()) {
    throw DataError("selection rule references covariate " +
                    std::to_string(rule.covariate) + " but dataset has " +
                    std::to_string(ds.dim()));
  }
  RowSet keep;
  std::size_t arm_kept = 0, arm_total = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const bool in_arm = ds.t[i] == rule.arm;
    arm_total += in_arm;
    if (rule.matches(ds, i)) continue;
    arm_kept += in_arm;
    keep.push_back(static_cast<std::int32_t>(i));
  }
  if (arm_total > 0 && arm_kept == 0) {
    throw DataError("selection rule removes the entire t=" +
                    std::to_string(rule.arm) + " arm");
  }
  return ds.subset(keep);
}

Dataset adopt_observed_as_target(const Dataset& ds) {
  if (ds.has_oracle_targets()) return ds;
  Dataset out = ds;
  out.y_star_0 = ds.y;
  out.y_star_1 = ds.y;
  return out;
}

}  // namespace ome::dgp
