#pragma once

#include "ome/cli/config.hpp"

namespace ome::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitEstimator = 3;

// Writes the configured dataset (synthetic draw plus any corruption) as CSV
// under the output directory. Deterministic: equal configs produce
// byte-identical files.
int cmd_generate(const ExperimentConfig& cfg);

// Fits every configured estimator on the training data and writes
// reports.csv, summary.json and provenance.txt. Per-estimator failures are
// recorded and reported; any failure yields a nonzero exit.
int cmd_run(const ExperimentConfig& cfg);

// Runs the configured sweep with per-cell output files; completed cells are
// loaded instead of recomputed, so interrupted sweeps resume.
int cmd_sweep(const ExperimentConfig& cfg);

// Maps an exception to the exit-code taxonomy.
int exit_code_for(const std::exception& ex);

}  // namespace ome::cli
