#pragma once

#include <functional>
#include <optional>

#include "ome/dgp/synthetic.hpp"
#include "ome/eval/metrics.hpp"

namespace ome::eval {

// One experiment sweep over a single axis: training sample size, or the
// arm-0 error grid. Each cell regenerates data with a seed derived purely
// from (base seed, axis value, repetition), fits every estimator, and
// evaluates on a fresh noise-free test draw of fixed size.
struct SweepSpec {
  enum class Axis { SampleSize, ErrorGrid };
  Axis axis = Axis::SampleSize;
  std::vector<std::size_t> sizes;            // Axis::SampleSize
  std::vector<ErrorParams> error_settings;   // Axis::ErrorGrid, arm 0
  std::size_t repetitions = 1;

  dgp::SyntheticConfig base;                 // n / error0 overridden per cell
  std::vector<pipelines::EstimatorSpec> estimators;
  learner::TrainConfig train;
  std::size_t test_n = 10000;
  bool measure_accuracy0 = true;
  bool measure_ate_bias = false;

  void validate() const;
  std::size_t cell_count() const;
};

struct CellFailure {
  double axis_value = 0.0;
  std::size_t repetition = 0;
  std::string estimator;
  std::string message;
};

struct SweepResult {
  std::vector<MetricReport> reports;    // aggregated: one row per
                                        // (axis value, estimator, metric)
  std::vector<CellFailure> failures;    // recorded, never fatal
};

// Metric samples for one (axis value, repetition) cell; resumable callers
// persist these per cell. `estimator` x `metric` rows with runs == 1.
std::vector<MetricReport> run_sweep_cell(const SweepSpec& spec,
                                         std::size_t axis_index,
                                         std::size_t repetition,
                                         std::vector<CellFailure>* failures);

// Runs every cell (optionally in parallel) and aggregates mean / stderr per
// estimator and metric. Per-cell estimator failures are recorded without
// aborting the sweep.
SweepResult run_sweep(const SweepSpec& spec, std::size_t jobs = 1);

// Aggregation used by run_sweep; exposed for callers that persist cells.
std::vector<MetricReport> aggregate_cells(
    const std::vector<std::vector<MetricReport>>& cells);

double axis_value_of(const SweepSpec& spec, std::size_t axis_index);

// Seed for a cell: pure in (base seed, axis value, repetition index).
RngSeed cell_seed(const SweepSpec& spec, std::size_t axis_index,
                  std::size_t repetition);

}  // namespace ome::eval
