#pragma once

#include "ome/core/dataset.hpp"
#include "ome/core/rng.hpp"

namespace ome::dgp {

// Rebuilds the proxy columns by class-conditional flips of the target
// columns (per-arm rates), then rebuilds observed y by consistency. Target
// columns are left untouched. Throws DataError when target columns are
// missing; invalid ErrorParams are rejected.
Dataset flip_labels(const Dataset& ds, const ErrorParams& e0,
                    const ErrorParams& e1, RngSeed seed);

// Threshold predicate over (arm, one covariate). Pure: the same row always
// gets the same decision. Sufficient for income-threshold and
// cohort-inclusion style selection designs.
struct SelectionRule {
  int arm = 1;
  std::size_t covariate = 0;
  enum class Op { Greater, GreaterEq, Less, LessEq } op = Op::Greater;
  double threshold = 0.0;

  bool matches(const Dataset& ds, std::size_t row) const;
};

// Returns ds minus the rows matching the rule. Training-data-only by caller
// contract; test folds must never pass through this operation. Throws
// DataError if the rule would remove an entire treatment arm.
Dataset inject_selection_bias(const Dataset& ds, const SelectionRule& rule);

// Promotes the observed outcome to a factual target column pair, for
// RCT-style CSVs where the recorded outcome is the measurement target.
// Counterfactual entries mirror the factual value and are placeholders:
// they make flip_labels applicable but carry no counterfactual information.
Dataset adopt_observed_as_target(const Dataset& ds);

}  // namespace ome::dgp
