#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ome/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual outcome prediction under treatment-conditional "
               "outcome measurement error"};
  app.require_subcommand(1);

  std::string config_path;
  ome::cli::Overrides overrides;
  std::uint64_t seed_flag = 0;
  std::size_t n_flag = 0, jobs_flag = 0;
  std::string out_flag, estimators_flag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON experiment config")->required();
    cmd->add_option("--seed", seed_flag, "Override the master seed");
    cmd->add_option("--out", out_flag, "Override the output directory");
    cmd->add_option("--n", n_flag, "Override the synthetic sample count");
    cmd->add_option("--estimators", estimators_flag,
                    "Comma-separated estimator kinds (oracle-parameter forms)");
    cmd->add_option("--jobs", jobs_flag, "Parallel sweep cells");
  };

  auto* generate = app.add_subcommand("generate", "Write the configured dataset as CSV");
  auto* run = app.add_subcommand("run", "Fit the configured estimators and report metrics");
  auto* sweep = app.add_subcommand("sweep", "Run the configured sweep with per-cell resume");
  add_common(generate);
  add_common(run);
  add_common(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->count("--seed") || run->count("--seed") ||
        sweep->count("--seed")) {
      overrides.seed = seed_flag;
    }
    if (!out_flag.empty()) overrides.out_dir = out_flag;
    if (n_flag > 0) overrides.n = n_flag;
    if (!estimators_flag.empty()) overrides.estimators = estimators_flag;
    if (jobs_flag > 0) overrides.jobs = jobs_flag;

    const auto cfg = ome::cli::load_config(config_path, overrides);
    if (generate->parsed()) return ome::cli::cmd_generate(cfg);
    if (run->parsed()) return ome::cli::cmd_run(cfg);
    return ome::cli::cmd_sweep(cfg);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return ome::cli::exit_code_for(ex);
  }
}
