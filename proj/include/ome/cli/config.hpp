#pragma once

#include <optional>
#include <string>

#include "ome/dgp/corruption.hpp"
#include "ome/dgp/synthetic.hpp"
#include "ome/eval/sweep.hpp"

namespace ome::cli {

// Fully resolved experiment description: one declarative JSON file plus a
// handful of flag overrides.
struct ExperimentConfig {
  RngSeed seed = 0;
  std::string out_dir = "out";

  // Data source: exactly one of the two.
  std::optional<dgp::SyntheticConfig> synthetic;
  std::optional<std::string> csv_path;

  // Optional corruption of the training data.
  bool corruption_enabled = false;
  ErrorParams corrupt0, corrupt1;
  std::optional<dgp::SelectionRule> selection;
  std::optional<std::string> selection_covariate;  // name, resolved at run time

  std::vector<pipelines::EstimatorSpec> estimators;
  learner::TrainConfig train;
  pipelines::FitMode fit_mode = pipelines::FitMode::CrossFit;

  std::size_t test_n = 10000;        // synthetic test draw size
  std::size_t holdout_folds = 5;     // CSV: 1/k of rows become the test fold
  std::optional<double> tau_true;    // override for ate_bias

  bool measure_accuracy0 = true;
  bool measure_accuracy1 = false;
  bool measure_ate_bias = false;

  // Sweep block (enables the sweep command).
  std::optional<eval::SweepSpec> sweep;
  std::size_t jobs = 1;

  std::string digest;   // over the resolved config
  std::string resolved; // canonical JSON echo for provenance

  void validate() const;
};

struct Overrides {
  std::optional<RngSeed> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> n;
  std::optional<std::string> estimators;  // comma-separated kinds
  std::optional<std::size_t> jobs;
};

// Parses the JSON config file and applies flag overrides. Throws
// ConfigError on any malformed or inconsistent field.
ExperimentConfig load_config(const std::string& path, const Overrides& overrides);
ExperimentConfig parse_config(const std::string& json_text, const Overrides& overrides);

}  // namespace ome::cli
