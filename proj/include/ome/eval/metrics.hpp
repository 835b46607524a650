#pragma once

#include <string>

#include "ome/core/dataset.hpp"
#include "ome/pipelines/estimators.hpp"

namespace ome::eval {

struct MetricReport {
  std::string estimator;
  std::string metric;
  double value = 0.0;
  double stderr_value = 0.0;  // over runs; 0 for a single run
  std::size_t runs = 1;
  std::string config_digest;
  std::string axis;        // sweep axis label, empty outside sweeps
  double axis_value = 0.0;
};

// Fraction of test rows where 1[eta_hat(x) >= 0.5] equals y_star_t; a
// prediction of exactly 0.5 classifies as 1. Requires the arm's oracle
// target column.
MetricReport accuracy_on_target(const pipelines::FittedEstimator& est,
                                const Dataset& test, int t);

// tau_true minus the estimated ATE mean(eta_hat_1 - eta_hat_0) over test.
MetricReport ate_bias(const pipelines::FittedEstimator& est, const Dataset& test,
                      double tau_true);

// Population ATE of the test draw, from its oracle target columns.
double oracle_ate(const Dataset& test);

}  // namespace ome::eval
