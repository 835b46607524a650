#include "ome/cli/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ome/core/digest.hpp"

namespace ome::cli {

using json = nlohmann::json;
using measurement::AnchorSpec;
using pipelines::EstimatorKind;
using pipelines::EstimatorSpec;
using pipelines::FitMode;
using pipelines::ParamSource;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

ErrorParams parse_error_params(const json& j, const char* where) {
  if (!j.is_object()) bad(std::string(where) + ": expected {alpha, beta}");
  ErrorParams e{j.value("alpha", 0.0), j.value("beta", 0.0)};
  e.validate(where);
  return e;
}

AnchorSpec parse_anchor(const json& j) {
  if (j.is_string()) {
    const auto type = measurement::anchor_from_name(j.get<std::string>());
    if (type == measurement::AnchorType::BaseRate ||
        type == measurement::AnchorType::KnownAlpha ||
        type == measurement::AnchorType::KnownBeta) {
      bad("anchor '" + j.get<std::string>() + "' needs a value; use {\"type\": ..., \"value\": ...}");
    }
    return {type, std::nullopt};
  }
  if (j.is_object()) {
    AnchorSpec spec;
    spec.type = measurement::anchor_from_name(j.at("type").get<std::string>());
    if (j.contains("value")) spec.value = j.at("value").get<double>();
    spec.validate();
    return spec;
  }
  bad("anchor must be a string or an object");
}

FitMode parse_fit_mode(const std::string& name) {
  if (name == "single") return FitMode::Single;
  if (name == "split") return FitMode::Split;
  if (name == "crossfit") return FitMode::CrossFit;
  bad("unknown fit_mode: " + name + " (expected single|split|crossfit)");
}

dgp::SelectionRule parse_selection(const json& j,
                                   std::optional<std::string>& covariate_name) {
  dgp::SelectionRule rule;
  rule.arm = j.value("arm", 1);
  if (rule.arm != 0 && rule.arm != 1) bad("selection.arm must be 0 or 1");
  rule.threshold = j.at("threshold").get<double>();
  const std::string op = j.value("op", ">");
  if (op == ">") rule.op = dgp::SelectionRule::Op::Greater;
  else if (op == ">=") rule.op = dgp::SelectionRule::Op::GreaterEq;
  else if (op == "<") rule.op = dgp::SelectionRule::Op::Less;
  else if (op == "<=") rule.op = dgp::SelectionRule::Op::LessEq;
  else bad("selection.op must be one of > >= < <=");
  if (j.contains("covariate")) {
    const json& cov = j.at("covariate");
    if (cov.is_number_unsigned() || cov.is_number_integer()) {
      rule.covariate = cov.get<std::size_t>();
    } else {
      covariate_name = cov.get<std::string>();
    }
  }
  return rule;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (synthetic.has_value() == csv_path.has_value()) {
    bad("config needs exactly one data source: synthetic or csv");
  }
  if (synthetic) synthetic->validate();
  if (estimators.empty()) bad("config lists no estimators");
  train.validate();
  if (corruption_enabled) {
    corrupt0.validate("corruption error0");
    corrupt1.validate("corruption error1");
  }
  if (test_n < 1 && synthetic) bad("test.n must be >= 1");
  if (holdout_folds < 2) bad("test.holdout_folds must be >= 2");
}

ExperimentConfig parse_config(const std::string& json_text,
                              const Overrides& overrides) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    bad(std::string("config is not valid JSON: ") + ex.what());
  }

  ExperimentConfig cfg;
  cfg.seed = root.value("seed", 0ULL);
  if (overrides.seed) cfg.seed = *overrides.seed;
  cfg.out_dir = root.value("out", "out");
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  cfg.jobs = root.value("jobs", 1u);
  if (overrides.jobs) cfg.jobs = *overrides.jobs;

  if (!root.contains("data")) bad("config requires a data block");
  const json& data = root.at("data");
  const std::string source = data.value("source", "synthetic");
  if (source == "synthetic") {
    dgp::SyntheticConfig syn;
    syn.n = data.value("n", 10000u);
    if (overrides.n) syn.n = *overrides.n;
    if (data.contains("error0")) syn.error0 = parse_error_params(data.at("error0"), "data.error0");
    if (data.contains("error1")) syn.error1 = parse_error_params(data.at("error1"), "data.error1");
    if (data.contains("constant_propensity") && !data.at("constant_propensity").is_null()) {
      syn.constant_propensity = data.at("constant_propensity").get<double>();
    }
    syn.target_scale_0 = data.value("target_scale_0", 1.0);
    syn.target_scale_1 = data.value("target_scale_1", 1.0);
    syn.seed = derive_seed(cfg.seed, 0xDA7A);
    cfg.synthetic = syn;
  } else if (source == "csv") {
    cfg.csv_path = data.at("path").get<std::string>();
  } else {
    bad("data.source must be synthetic or csv");
  }

  if (root.contains("corruption")) {
    const json& corr = root.at("corruption");
    cfg.corruption_enabled = corr.value("enabled", true);
    if (corr.contains("error0")) cfg.corrupt0 = parse_error_params(corr.at("error0"), "corruption.error0");
    if (corr.contains("error1")) cfg.corrupt1 = parse_error_params(corr.at("error1"), "corruption.error1");
    if (corr.contains("selection")) {
      cfg.selection = parse_selection(corr.at("selection"), cfg.selection_covariate);
    }
  }

  if (root.contains("train")) {
    const json& tr = root.at("train");
    cfg.train.learning_rate = tr.value("learning_rate", 5e-4);
    cfg.train.epochs = tr.value("epochs", 10u);
    cfg.train.batch_size = tr.value("batch_size", 256u);
    cfg.train.grad_clip = tr.value("grad_clip", 5.0);
    if (tr.contains("hidden")) {
      cfg.train.hidden = tr.at("hidden").get<std::vector<std::size_t>>();
    }
    const std::string act = tr.value("activation", "relu");
    if (act == "relu") cfg.train.activation = learner::Activation::ReLU;
    else if (act == "tanh") cfg.train.activation = learner::Activation::Tanh;
    else bad("train.activation must be relu or tanh");
    const std::string opt = tr.value("optimizer", "adam");
    if (opt == "adam") cfg.train.optimizer = learner::Optimizer::Adam;
    else if (opt == "sgd") cfg.train.optimizer = learner::Optimizer::Sgd;
    else bad("train.optimizer must be adam or sgd");
    cfg.fit_mode = parse_fit_mode(tr.value("fit_mode", "crossfit"));
  }

  // Oracle parameters for SL/RWSL come from the corruption block when
  // corruption is on, otherwise from the synthetic DGP noise.
  ErrorParams oracle0, oracle1;
  bool have_oracle = false;
  if (cfg.corruption_enabled) {
    oracle0 = cfg.corrupt0;
    oracle1 = cfg.corrupt1;
    have_oracle = true;
  } else if (cfg.synthetic) {
    oracle0 = cfg.synthetic->error0;
    oracle1 = cfg.synthetic->error1;
    have_oracle = true;
  }

  std::string estimators_text;
  if (overrides.estimators) {
    estimators_text = *overrides.estimators;
  }
  if (!estimators_text.empty()) {
    std::stringstream ss(estimators_text);
    std::string name;
    while (std::getline(ss, name, ',')) {
      EstimatorSpec spec;
      spec.kind = pipelines::estimator_from_name(name);
      spec.mode = cfg.fit_mode;
      if (spec.kind == EstimatorKind::SL || spec.kind == EstimatorKind::RWSL) {
        if (!have_oracle) bad("estimator " + name + " needs oracle params or anchors");
        spec.source = ParamSource::oracle(oracle0, oracle1);
      }
      cfg.estimators.push_back(spec);
    }
  } else if (root.contains("estimators")) {
    for (const json& ej : root.at("estimators")) {
      EstimatorSpec spec;
      if (ej.is_string()) {
        spec.kind = pipelines::estimator_from_name(ej.get<std::string>());
      } else {
        spec.kind = pipelines::estimator_from_name(ej.at("kind").get<std::string>());
      }
      spec.mode = cfg.fit_mode;
      if (ej.is_object() && ej.contains("fit_mode")) {
        spec.mode = parse_fit_mode(ej.at("fit_mode").get<std::string>());
      }
      if (spec.kind == EstimatorKind::SL || spec.kind == EstimatorKind::RWSL) {
        const bool wants_anchors = ej.is_object() && ej.contains("anchors");
        if (wants_anchors) {
          const json& anchors = ej.at("anchors");
          if (!anchors.is_array() || anchors.size() != 2) {
            bad("estimator anchors must be a two-element array");
          }
          spec.source = ParamSource::learned(parse_anchor(anchors[0]),
                                             parse_anchor(anchors[1]));
        } else {
          ErrorParams e0 = oracle0, e1 = oracle1;
          bool explicit_params = false;
          if (ej.is_object() && ej.contains("error0")) {
            e0 = parse_error_params(ej.at("error0"), "estimator error0");
            explicit_params = true;
          }
          if (ej.is_object() && ej.contains("error1")) {
            e1 = parse_error_params(ej.at("error1"), "estimator error1");
            explicit_params = true;
          }
          if (!have_oracle && !explicit_params) {
            bad("estimator '" + pipelines::estimator_name(spec.kind) +
                "' needs params: oracle source unavailable for csv data "
                "without corruption; supply anchors or error0/error1");
          }
          spec.source = ParamSource::oracle(e0, e1);
        }
        try {
          spec.source.validate();
        } catch (const std::exception& ex) {
          bad(ex.what());  // bad parameter sources are config errors here
        }
      }
      cfg.estimators.push_back(spec);
    }
  }

  if (root.contains("test")) {
    cfg.test_n = root.at("test").value("n", 10000u);
    cfg.holdout_folds = root.at("test").value("holdout_folds", 5u);
  }
  if (root.contains("tau_true") && !root.at("tau_true").is_null()) {
    cfg.tau_true = root.at("tau_true").get<double>();
  }
  if (root.contains("metrics")) {
    cfg.measure_accuracy0 = false;
    cfg.measure_accuracy1 = false;
    cfg.measure_ate_bias = false;
    for (const auto& m : root.at("metrics")) {
      const std::string name = m.get<std::string>();
      if (name == "accuracy0") cfg.measure_accuracy0 = true;
      else if (name == "accuracy1") cfg.measure_accuracy1 = true;
      else if (name == "ate_bias") cfg.measure_ate_bias = true;
      else bad("unknown metric: " + name);
    }
  }

  if (root.contains("sweep")) {
    if (!cfg.synthetic) bad("sweep requires a synthetic data source");
    const json& sw = root.at("sweep");
    eval::SweepSpec spec;
    const std::string axis = sw.value("axis", "n");
    if (axis == "n") {
      spec.axis = eval::SweepSpec::Axis::SampleSize;
      spec.sizes = sw.at("values").get<std::vector<std::size_t>>();
    } else if (axis == "error0") {
      spec.axis = eval::SweepSpec::Axis::ErrorGrid;
      for (const json& e : sw.at("values")) {
        spec.error_settings.push_back(parse_error_params(e, "sweep value"));
      }
    } else {
      bad("sweep.axis must be n or error0");
    }
    spec.repetitions = sw.value("repetitions", 1u);
    spec.base = *cfg.synthetic;
    spec.base.seed = cfg.seed;
    spec.estimators = cfg.estimators;
    spec.train = cfg.train;
    spec.test_n = cfg.test_n;
    spec.measure_accuracy0 = cfg.measure_accuracy0;
    spec.measure_ate_bias = cfg.measure_ate_bias;
    cfg.sweep = std::move(spec);
  }

  cfg.validate();

  // Canonical echo for provenance and digesting.
  json echo = root;
  echo["seed"] = cfg.seed;
  echo["out"] = cfg.out_dir;
  cfg.resolved = echo.dump(2);
  cfg.digest = digest_hex(cfg.resolved);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace ome::cli
