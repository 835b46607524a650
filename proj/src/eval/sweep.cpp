#include "ome/eval/sweep.hpp"

#include <cmath>
#include <cstring>
#include <future>
#include <map>

namespace ome::eval {

namespace {

std::uint64_t bits_of(double v) {
  std::uint64_t out;
  std::memcpy(&out, &v, sizeof(out));
  return out;
}

}  // namespace

void SweepSpec::validate() const {
  if (axis == Axis::SampleSize && sizes.empty()) {
    throw ConfigError("sample-size sweep needs at least one size");
  }
  if (axis == Axis::ErrorGrid && error_settings.empty()) {
    throw ConfigError("error-grid sweep needs at least one setting");
  }
  if (repetitions < 1) throw ConfigError("sweep repetitions must be >= 1");
  if (estimators.empty()) throw ConfigError("sweep needs at least one estimator");
  // The axis supplies n on a sample-size sweep, so the base n is not used.
  dgp::SyntheticConfig base_check = base;
  if (axis == Axis::SampleSize) base_check.n = sizes.front();
  base_check.validate();
  train.validate();
  for (const auto& e : error_settings) e.validate("sweep error setting");
}

std::size_t SweepSpec::cell_count() const {
  const std::size_t axis_n =
      axis == Axis::SampleSize ? sizes.size() : error_settings.size();
  return axis_n * repetitions;
}

double axis_value_of(const SweepSpec& spec, std::size_t axis_index) {
  if (spec.axis == SweepSpec::Axis::SampleSize) {
    return static_cast<double>(spec.sizes[axis_index]);
  }
  // Encode the error pair as alpha + beta/1000 for reporting; the full pair
  // is recoverable from the spec by index.
  const auto& e = spec.error_settings[axis_index];
  return e.alpha + e.beta / 1000.0;
}

RngSeed cell_seed(const SweepSpec& spec, std::size_t axis_index,
                  std::size_t repetition) {
  std::uint64_t axis_tag;
  if (spec.axis == SweepSpec::Axis::SampleSize) {
    axis_tag = spec.sizes[axis_index];
  } else {
    const auto& e = spec.error_settings[axis_index];
    axis_tag = bits_of(e.alpha) ^ mix64(bits_of(e.beta));
  }
  return derive_seed(spec.base.seed, axis_tag, repetition);
}

std::vector<MetricReport> run_sweep_cell(const SweepSpec& spec,
                                         std::size_t axis_index,
                                         std::size_t repetition,
                                         std::vector<CellFailure>* failures) {
  const RngSeed seed = cell_seed(spec, axis_index, repetition);
  const double axis_value = axis_value_of(spec, axis_index);

  dgp::SyntheticConfig train_cfg = spec.base;
  if (spec.axis == SweepSpec::Axis::SampleSize) {
    train_cfg.n = spec.sizes[axis_index];
  } else {
    train_cfg.error0 = spec.error_settings[axis_index];
  }
  train_cfg.seed = derive_seed(seed, 1);
  const Dataset train_ds = dgp::sample_synthetic(train_cfg);

  // Fresh test draw: same covariate/treatment/target process, no proxy
  // corruption. Test data never passes through corruption or selection.
  dgp::SyntheticConfig test_cfg = train_cfg;
  test_cfg.n = spec.test_n;
  test_cfg.error0 = {};
  test_cfg.error1 = {};
  test_cfg.seed = derive_seed(seed, 2);
  const Dataset test_ds = dgp::sample_synthetic(test_cfg);
  const double tau = oracle_ate(test_ds);

  std::vector<MetricReport> out;
  for (std::size_t ei = 0; ei < spec.estimators.size(); ++ei) {
    pipelines::EstimatorSpec espec = spec.estimators[ei];
    // Oracle parameter sources follow the cell's true arm-0 rates.
    if (spec.axis == SweepSpec::Axis::ErrorGrid &&
        (espec.kind == pipelines::EstimatorKind::SL ||
         espec.kind == pipelines::EstimatorKind::RWSL) &&
        espec.source.kind == pipelines::ParamSource::Kind::Oracle) {
      espec.source.oracle0 = train_cfg.error0;
    }
    try {
      // Shared fit seed: same-anchor estimators reuse the same fold splits
      // and parameter estimates within a cell.
      const auto fitted = pipelines::fit_estimator(espec, train_ds, spec.train,
                                                   derive_seed(seed, 1000));
      auto push = [&](MetricReport r) {
        r.estimator = espec.display_name();
        r.axis = spec.axis == SweepSpec::Axis::SampleSize ? "n" : "error0";
        r.axis_value = axis_value;
        out.push_back(std::move(r));
      };
      if (spec.measure_accuracy0) push(accuracy_on_target(fitted, test_ds, 0));
      if (spec.measure_ate_bias) push(ate_bias(fitted, test_ds, tau));
    } catch (const std::exception& ex) {
      if (failures) {
        failures->push_back(
            {axis_value, repetition, espec.display_name(), ex.what()});
      }
    }
  }
  return out;
}

std::vector<MetricReport> aggregate_cells(
    const std::vector<std::vector<MetricReport>>& cells) {
  struct Key {
    double axis_value;
    std::string estimator;
    std::string metric;
    bool operator<(const Key& o) const {
      return std::tie(axis_value, estimator, metric) <
             std::tie(o.axis_value, o.estimator, o.metric);
    }
  };
  std::map<Key, std::vector<double>> samples;
  std::map<Key, std::string> digests;
  std::map<Key, std::string> axes;
  for (const auto& cell : cells) {
    for (const auto& r : cell) {
      const Key k{r.axis_value, r.estimator, r.metric};
      samples[k].push_back(r.value);
      digests[k] = r.config_digest;
      axes[k] = r.axis;
    }
  }
  std::vector<MetricReport> out;
  for (const auto& [k, values] : samples) {
    MetricReport r;
    r.estimator = k.estimator;
    r.metric = k.metric;
    r.axis = axes[k];
    r.axis_value = k.axis_value;
    r.runs = values.size();
    r.config_digest = digests[k];
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    r.value = mean;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
      r.stderr_value = sd / std::sqrt(static_cast<double>(values.size()));
    }
    out.push_back(std::move(r));
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec, std::size_t jobs) {
  spec.validate();
  const std::size_t axis_n = spec.axis == SweepSpec::Axis::SampleSize
                                 ? spec.sizes.size()
                                 : spec.error_settings.size();

  struct CellId {
    std::size_t axis_index, repetition;
  };
  std::vector<CellId> ids;
  for (std::size_t a = 0; a < axis_n; ++a) {
    for (std::size_t r = 0; r < spec.repetitions; ++r) ids.push_back({a, r});
  }

  std::vector<std::vector<MetricReport>> cells(ids.size());
  std::vector<std::vector<CellFailure>> fails(ids.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      cells[i] =
          run_sweep_cell(spec, ids[i].axis_index, ids[i].repetition, &fails[i]);
    }
  } else {
    std::size_t next = 0;
    while (next < ids.size()) {
      const std::size_t stop = std::min(ids.size(), next + jobs);
      std::vector<std::future<std::vector<MetricReport>>> futures;
      for (std::size_t i = next; i < stop; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
          return run_sweep_cell(spec, ids[i].axis_index, ids[i].repetition,
                                &fails[i]);
        }));
      }
      for (std::size_t i = next; i < stop; ++i) {
        cells[i] = futures[i - next].get();
      }
      next = stop;
    }
  }

  SweepResult result;
  result.reports = aggregate_cells(cells);
  for (auto& f : fails) {
    result.failures.insert(result.failures.end(), f.begin(), f.end());
  }
  return result;
}

}  // namespace ome::eval
