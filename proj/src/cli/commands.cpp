#include "ome/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ome/core/csv.hpp"
#include "ome/core/folds.hpp"
#include "ome/eval/metrics.hpp"

namespace ome::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct PreparedData {
  Dataset train;
  Dataset test;
  std::optional<double> tau_true;
};

dgp::SelectionRule resolve_selection(const ExperimentConfig& cfg,
                                     const Dataset& ds) {
  dgp::SelectionRule rule = *cfg.selection;
  if (cfg.selection_covariate) {
    rule.covariate = ds.covariate_index(*cfg.selection_covariate);
  }
  return rule;
}

Dataset corrupt_training_data(const ExperimentConfig& cfg, Dataset train) {
  if (!cfg.corruption_enabled) return train;
  if (!train.has_oracle_targets()) {
    // RCT-style CSV: the recorded outcome is the measurement target.
    train = dgp::adopt_observed_as_target(train);
  }
  train = dgp::flip_labels(train, cfg.corrupt0, cfg.corrupt1,
                           derive_seed(cfg.seed, 0xF11b));
  if (cfg.selection) {
    train = dgp::inject_selection_bias(train, resolve_selection(cfg, train));
  }
  return train;
}

// Builds the train/test pair. The test dataset is materialized before any
// corruption runs, so corrupted rows cannot reach it.
PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData out;
  if (cfg.synthetic) {
    Dataset train = dgp::sample_synthetic(*cfg.synthetic);

    dgp::SyntheticConfig test_cfg = *cfg.synthetic;
    test_cfg.n = cfg.test_n;
    test_cfg.error0 = {};
    test_cfg.error1 = {};
    test_cfg.seed = derive_seed(cfg.seed, 0x7E57);
    out.test = dgp::sample_synthetic(test_cfg);
    out.tau_true = cfg.tau_true ? *cfg.tau_true : eval::oracle_ate(out.test);

    out.train = corrupt_training_data(cfg, std::move(train));
    return out;
  }

  Dataset full = read_csv_file(*cfg.csv_path);
  const auto parts = split_rows(full, all_rows(full), cfg.holdout_folds,
                                derive_seed(cfg.seed, 0x51137));
  RowSet train_rows;
  for (std::size_t f = 1; f < parts.size(); ++f) {
    train_rows.insert(train_rows.end(), parts[f].begin(), parts[f].end());
  }
  out.test = full.subset(parts[0]);
  out.train = corrupt_training_data(cfg, full.subset(train_rows));
  out.tau_true = cfg.tau_true;
  if (!out.tau_true && out.test.has_oracle_targets()) {
    out.tau_true = eval::oracle_ate(out.test);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw DataError("cannot open " + tmp + " for writing");
    f << content;
  }
  fs::rename(tmp, path);
}

std::string report_csv_header() {
  return "estimator,axis,axis_value,metric,mean,stderr,runs,seed,digest\n";
}

void append_report_row(std::ostringstream& out, const eval::MetricReport& r,
                       RngSeed seed) {
  out << r.estimator << ',' << (r.axis.empty() ? "-" : r.axis) << ','
      << r.axis_value << ',' << r.metric << ',' << r.value << ','
      << r.stderr_value << ',' << r.runs << ',' << seed << ',' << r.config_digest
      << '\n';
}

json report_json(const eval::MetricReport& r) {
  return json{{"estimator", r.estimator}, {"axis", r.axis},
              {"axis_value", r.axis_value}, {"metric", r.metric},
              {"value", r.value},           {"stderr", r.stderr_value},
              {"runs", r.runs},             {"digest", r.config_digest}};
}

}  // namespace

int exit_code_for(const std::exception& ex) {
  if (dynamic_cast<const ConfigError*>(&ex)) return kExitConfig;
  if (dynamic_cast<const DataError*>(&ex)) return kExitData;
  return kExitEstimator;
}

int cmd_generate(const ExperimentConfig& cfg) {
  if (!cfg.synthetic) {
    throw ConfigError("generate requires a synthetic data source");
  }
  fs::create_directories(cfg.out_dir);
  Dataset ds = dgp::sample_synthetic(*cfg.synthetic);
  ds = corrupt_training_data(cfg, std::move(ds));
  validate_dataset(ds);
  const std::string path = (fs::path(cfg.out_dir) / "dataset.csv").string();
  write_csv_file(ds, path);

  std::ostringstream prov;
  prov << "digest: " << cfg.digest << "\nseed: " << cfg.seed << "\nrows: " << ds.n()
       << "\nfile: " << path << "\n\nresolved config:\n" << cfg.resolved << "\n";
  write_text_file((fs::path(cfg.out_dir) / "provenance.txt").string(), prov.str());
  std::cout << "wrote " << path << " (" << ds.n() << " rows)\n";
  return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const PreparedData data = prepare_data(cfg);
  validate_dataset(data.train);

  std::vector<eval::MetricReport> reports;
  std::vector<std::pair<std::string, std::string>> failures;
  json learned = json::object();

  // One fit seed for the whole run: estimators with the same anchor pair
  // resolve identical fold splits and share CCPE estimates, and results do
  // not depend on list order.
  const RngSeed fit_seed = derive_seed(cfg.seed, 0xF17);
  for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
    const auto& spec = cfg.estimators[ei];
    const std::string name = spec.display_name();
    try {
      const auto fitted =
          pipelines::fit_estimator(spec, data.train, cfg.train, fit_seed);
      if (cfg.measure_accuracy0) {
        auto r = eval::accuracy_on_target(fitted, data.test, 0);
        r.estimator = name;
        reports.push_back(std::move(r));
      }
      if (cfg.measure_accuracy1) {
        auto r = eval::accuracy_on_target(fitted, data.test, 1);
        r.estimator = name;
        reports.push_back(std::move(r));
      }
      if (cfg.measure_ate_bias && data.tau_true) {
        auto r = eval::ate_bias(fitted, data.test, *data.tau_true);
        r.estimator = name;
        reports.push_back(std::move(r));
      }
      if (fitted.prov.learned0 || fitted.prov.learned1) {
        json lj;
        if (fitted.prov.learned0) {
          lj["arm0"] = {{"alpha", fitted.prov.learned0->alpha},
                        {"beta", fitted.prov.learned0->beta}};
        }
        if (fitted.prov.learned1) {
          lj["arm1"] = {{"alpha", fitted.prov.learned1->alpha},
                        {"beta", fitted.prov.learned1->beta}};
        }
        learned[name] = lj;
      }
    } catch (const std::exception& ex) {
      failures.emplace_back(name, ex.what());
      std::cerr << "estimator " << name << " failed: " << ex.what() << "\n";
    }
  }

  std::ostringstream csv;
  csv << report_csv_header();
  for (const auto& r : reports) append_report_row(csv, r, cfg.seed);
  write_text_file((fs::path(cfg.out_dir) / "reports.csv").string(), csv.str());

  json summary;
  summary["digest"] = cfg.digest;
  summary["seed"] = cfg.seed;
  summary["reports"] = json::array();
  for (const auto& r : reports) summary["reports"].push_back(report_json(r));
  summary["learned_params"] = learned;
  summary["failures"] = json::array();
  for (const auto& [who, what] : failures) {
    summary["failures"].push_back({{"estimator", who}, {"message", what}});
  }
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(),
                  summary.dump(2) + "\n");

  std::ostringstream prov;
  prov << "digest: " << cfg.digest << "\nseed: " << cfg.seed << "\n";
  if (!learned.empty()) prov << "learned params: " << learned.dump() << "\n";
  prov << "\nresolved config:\n" << cfg.resolved << "\n";
  write_text_file((fs::path(cfg.out_dir) / "provenance.txt").string(), prov.str());

  for (const auto& r : reports) {
    std::cout << r.estimator << " " << r.metric << " = " << r.value << "\n";
  }
  return failures.empty() ? kExitOk : kExitEstimator;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep) throw ConfigError("config has no sweep block");
  const eval::SweepSpec& spec = *cfg.sweep;
  spec.validate();

  fs::create_directories(cfg.out_dir);
  const fs::path cells_dir = fs::path(cfg.out_dir) / "cells";
  fs::create_directories(cells_dir);

  const std::size_t axis_n = spec.axis == eval::SweepSpec::Axis::SampleSize
                                 ? spec.sizes.size()
                                 : spec.error_settings.size();

  struct CellId {
    std::size_t axis_index, repetition;
    fs::path path;
  };
  std::vector<CellId> ids;
  for (std::size_t a = 0; a < axis_n; ++a) {
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      ids.push_back({a, rep,
                     cells_dir / ("cell_" + std::to_string(a) + "_" +
                                  std::to_string(rep) + ".csv")});
    }
  }

  auto load_cell = [](const fs::path& path) {
    std::vector<eval::MetricReport> cell;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      eval::MetricReport r;
      std::string axis_value, value, stderr_v, runs, seed, digest;
      std::getline(ss, r.estimator, ',');
      std::getline(ss, r.axis, ',');
      std::getline(ss, axis_value, ',');
      std::getline(ss, r.metric, ',');
      std::getline(ss, value, ',');
      std::getline(ss, stderr_v, ',');
      std::getline(ss, runs, ',');
      std::getline(ss, seed, ',');
      std::getline(ss, digest, ',');
      r.axis_value = std::stod(axis_value);
      r.value = std::stod(value);
      r.stderr_value = std::stod(stderr_v);
      r.runs = std::stoul(runs);
      r.config_digest = digest;
      cell.push_back(std::move(r));
    }
    return cell;
  };

  std::vector<std::vector<eval::MetricReport>> cells(ids.size());
  std::vector<std::vector<eval::CellFailure>> cell_failures(ids.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (fs::exists(ids[i].path)) {
      cells[i] = load_cell(ids[i].path);  // resume from the completed cell
    } else {
      pending.push_back(i);
    }
  }

  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  for (std::size_t next = 0; next < pending.size(); next += jobs) {
    const std::size_t stop = std::min(pending.size(), next + jobs);
    std::vector<std::future<std::vector<eval::MetricReport>>> futures;
    for (std::size_t p = next; p < stop; ++p) {
      const std::size_t i = pending[p];
      futures.push_back(std::async(
          jobs == 1 ? std::launch::deferred : std::launch::async, [&, i] {
            return eval::run_sweep_cell(spec, ids[i].axis_index,
                                        ids[i].repetition, &cell_failures[i]);
          }));
    }
    for (std::size_t p = next; p < stop; ++p) {
      const std::size_t i = pending[p];
      cells[i] = futures[p - next].get();
      std::ostringstream out;
      out << report_csv_header();
      for (const auto& r : cells[i]) append_report_row(out, r, cfg.seed);
      write_text_file(ids[i].path.string(), out.str());
    }
  }
  std::vector<eval::CellFailure> failures;
  for (auto& f : cell_failures) {
    failures.insert(failures.end(), f.begin(), f.end());
  }

  const auto reports = eval::aggregate_cells(cells);
  std::ostringstream out;
  out << report_csv_header();
  for (const auto& r : reports) append_report_row(out, r, cfg.seed);
  write_text_file((fs::path(cfg.out_dir) / "sweep.csv").string(), out.str());

  json summary;
  summary["digest"] = cfg.digest;
  summary["seed"] = cfg.seed;
  summary["reports"] = json::array();
  for (const auto& r : reports) summary["reports"].push_back(report_json(r));
  summary["failures"] = json::array();
  for (const auto& f : failures) {
    summary["failures"].push_back({{"axis_value", f.axis_value},
                                   {"repetition", f.repetition},
                                   {"estimator", f.estimator},
                                   {"message", f.message}});
  }
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(),
                  summary.dump(2) + "\n");

  std::ostringstream prov;
  prov << "digest: " << cfg.digest << "\nseed: " << cfg.seed
       << "\ncells: " << cells.size() << "\n\nresolved config:\n"
       << cfg.resolved << "\n";
  write_text_file((fs::path(cfg.out_dir) / "provenance.txt").string(), prov.str());

  std::cout << "sweep complete: " << reports.size() << " aggregated rows, "
            << failures.size() << " cell failures\n";
  return kExitOk;
}

}  // namespace ome::cli
