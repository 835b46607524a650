#include "ome/pipelines/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ome/core/digest.hpp"

namespace ome::pipelines {

using learner::Classifier;
using learner::LossSpec;
using learner::TrainConfig;
using measurement::AnchorSpec;

namespace {

// Stage tags for seed derivation; every stage of a pipeline draws from its
// own stream so fold structure and training stay reproducible per stage.
enum SeedTag : std::uint64_t {
  kTagFolds = 1,
  kTagCcpe = 2,
  kTagPropensity = 3,
  kTagTrain = 4,
  kTagCcpeSplit = 5,
  kTagCcpeFit = 6,
  kTagArm0 = 100,
  kTagArm1 = 101,
};

RowSet arm_rows_of(const Dataset& ds, const RowSet& rows, int t) {
  RowSet out;
  for (auto r : rows) {
    if (ds.t[r] == t) out.push_back(r);
  }
  return out;
}

const BinaryColumn& require_targets(const Dataset& ds, const char* who) {
  if (!ds.has_oracle_targets()) {
    throw DataError(std::string(who) +
                    " requires target columns y_star_0 and y_star_1");
  }
  return *ds.y_star_0;
}

BinaryColumn factual_targets(const Dataset& ds, const char* who) {
  require_targets(ds, who);
  BinaryColumn out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) out[i] = ds.factual_target(i);
  return out;
}

ErrorParams params_for_arm(const ParamSource& s, int t) {
  return t == 0 ? s.oracle0 : s.oracle1;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::UP: return "up";
    case EstimatorKind::UT: return "ut";
    case EstimatorKind::CP: return "cp";
    case EstimatorKind::SL: return "sl";
    case EstimatorKind::RWSL: return "rwsl";
    case EstimatorKind::TPO: return "tpo";
    case EstimatorKind::CT: return "ct";
  }
  return "?";
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "up") return EstimatorKind::UP;
  if (name == "ut") return EstimatorKind::UT;
  if (name == "cp") return EstimatorKind::CP;
  if (name == "sl") return EstimatorKind::SL;
  if (name == "rwsl") return EstimatorKind::RWSL;
  if (name == "tpo") return EstimatorKind::TPO;
  if (name == "ct") return EstimatorKind::CT;
  throw ConfigError("unknown estimator: " + name);
}

ParamSource ParamSource::oracle(const ErrorParams& e0, const ErrorParams& e1) {
  ParamSource s;
  s.kind = Kind::Oracle;
  s.oracle0 = e0;
  s.oracle1 = e1;
  return s;
}

ParamSource ParamSource::learned(const AnchorSpec& a, const AnchorSpec& b) {
  ParamSource s;
  s.kind = Kind::Learned;
  s.anchor_a = a;
  s.anchor_b = b;
  return s;
}

void ParamSource::validate() const {
  if (kind == Kind::Oracle) {
    oracle0.validate("oracle error0");
    oracle1.validate("oracle error1");
  } else {
    anchor_a.validate();
    anchor_b.validate();
    if (!measurement::check_identifiable(anchor_a.type, anchor_b.type)) {
      throw IdentificationError(
          "anchor pair (" + measurement::anchor_name(anchor_a.type) + ", " +
          measurement::anchor_name(anchor_b.type) + ") is not identifiable");
    }
  }
}

std::string EstimatorSpec::display_name() const {
  std::string name = estimator_name(kind);
  if (kind == EstimatorKind::SL || kind == EstimatorKind::RWSL) {
    if (source.kind == ParamSource::Kind::Oracle) {
      name += "_oracle";
    } else {
      name += "_" + measurement::anchor_name(source.anchor_a.type) + "_" +
              measurement::anchor_name(source.anchor_b.type);
    }
  }
  return name;
}

double FittedEstimator::predict_arm(int t, std::span<const double> x) const {
  const auto& models = arms[t];
  double sum = 0.0;
  for (const auto& m : models) sum += m.predict(x);
  return sum / static_cast<double>(models.size());
}

void FittedEstimator::predict_arm_rows(int t, const Matrix& x,
                                       std::span<const std::int32_t> rows,
                                       std::vector<double>& out) const {
  out.assign(rows.size(), 0.0);
  std::vector<double> tmp;
  const auto& models = arms[t];
  for (const auto& m : models) {
    m.predict_rows(x, rows, tmp);
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] += tmp[i];
  }
  for (auto& v : out) v /= static_cast<double>(models.size());
}

namespace {

// Anchor statistics need tail fidelity beyond what prediction fits need:
// the class-probability model trains with a 4x optimizer-step budget, and
// min/max anchors read robust quantiles (spurious dips below the floor are
// an extreme-value artifact; the peak estimate is trimmed only of noise).
constexpr int kCcpeStepBoost = 12;
constexpr measurement::AnchorExtraction kCcpeExtraction{0.01, 0.999};

TrainConfig ccpe_train_config(const TrainConfig& cfg, std::size_t n_rows,
                              RngSeed seed) {
  TrainConfig out = cfg.with_seed(seed);
  out.batch_size = std::max<std::size_t>(1, cfg.resolve_batch(n_rows) / kCcpeStepBoost);
  return out;
}

}  // namespace

ErrorParams ccpe(const Dataset& ds, const RowSet& rows, int t,
                 const AnchorSpec& a, const AnchorSpec& b,
                 const TrainConfig& cfg, RngSeed seed) {
  if (!measurement::check_identifiable(a.type, b.type)) {
    throw IdentificationError("anchor pair (" + measurement::anchor_name(a.type) +
                              ", " + measurement::anchor_name(b.type) +
                              ") is not identifiable");
  }
  const auto halves = split_rows(ds, rows, 2, derive_seed(seed, kTagCcpeSplit));
  const RowSet fit_rows = arm_rows_of(ds, halves[0], t);
  if (fit_rows.empty()) {
    throw DataError("ccpe: arm t=" + std::to_string(t) + " is empty in the fit fold");
  }
  const auto fitted =
      learner::train(ds.x, ds.y, fit_rows, LossSpec{},
                     ccpe_train_config(cfg, fit_rows.size(),
                                       derive_seed(seed, kTagCcpeFit)));
  std::vector<double> inferences;
  fitted.model.predict_rows(ds.x, halves[1], inferences);
  return measurement::identify(a, b, inferences, kCcpeExtraction);
}

ErrorParams ccpe_crossfit(const Dataset& ds, const RowSet& rows, int t,
                          const AnchorSpec& a, const AnchorSpec& b,
                          const TrainConfig& cfg, RngSeed seed) {
  const auto halves = split_rows(ds, rows, 2, derive_seed(seed, kTagCcpeSplit));
  double alpha = 0.0, beta = 0.0;
  for (int ordering = 0; ordering < 2; ++ordering) {
    const RowSet& fit_half = halves[ordering];
    const RowSet& anchor_half = halves[1 - ordering];
    const RowSet fit_rows = arm_rows_of(ds, fit_half, t);
    if (fit_rows.empty()) {
      throw DataError("ccpe: arm t=" + std::to_string(t) +
                      " is empty in the fit fold");
    }
    const auto fitted = learner::train(
        ds.x, ds.y, fit_rows, LossSpec{},
        ccpe_train_config(cfg, fit_rows.size(),
                          derive_seed(seed, kTagCcpeFit, ordering)));
    std::vector<double> inferences;
    fitted.model.predict_rows(ds.x, anchor_half, inferences);
    // Raw per-ordering solutions; validity is checked on the average.
    const ErrorParams e = measurement::identify_raw(a, b, inferences, kCcpeExtraction);
    alpha += 0.5 * e.alpha;
    beta += 0.5 * e.beta;
  }
  const ErrorParams avg{alpha, beta};
  if (!avg.valid()) {
    throw IdentificationError(
        "ccpe_crossfit: averaged parameters (alpha=" + std::to_string(avg.alpha) +
        ", beta=" + std::to_string(avg.beta) +
        ") are invalid; an anchor assumption is likely violated");
  }
  return avg;
}

namespace {

// Shared core of rwsl / surrogate_only. Stages per rotation: error
// parameters on fold m, propensity on fold n, risk minimization on fold p.
ArmFit fit_surrogate_arm(const Dataset& ds, int t, const ParamSource& source,
                         const TrainConfig& cfg, FitMode mode, RngSeed seed,
                         bool reweight) {
  source.validate();
  const bool learned = source.kind == ParamSource::Kind::Learned;

  struct Stage {
    RowSet params, propensity, train;
  };
  std::vector<Stage> stages;
  const RowSet everything = all_rows(ds);
  if (mode == FitMode::Single) {
    stages.push_back({everything, everything, everything});
  } else {
    const auto folds = split_rows(ds, everything, 3, derive_seed(seed, kTagFolds));
    if (mode == FitMode::Split) {
      stages.push_back({folds[0], folds[1], folds[2]});
    } else {
      for (auto [m, n, p] :
           {std::array<int, 3>{0, 1, 2}, {2, 0, 1}, {1, 2, 0}}) {
        stages.push_back({folds[m], folds[n], folds[p]});
      }
    }
  }

  ArmFit fit;
  double alpha_sum = 0.0, beta_sum = 0.0;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const Stage& stage = stages[s];

    ErrorParams e = params_for_arm(source, t);
    if (learned) {
      const RngSeed ccpe_seed = derive_seed(seed, kTagCcpe, s);
      e = mode == FitMode::CrossFit
              ? ccpe_crossfit(ds, stage.params, t, source.anchor_a,
                              source.anchor_b, cfg, ccpe_seed)
              : ccpe(ds, stage.params, t, source.anchor_a, source.anchor_b, cfg,
                     ccpe_seed);
      alpha_sum += e.alpha;
      beta_sum += e.beta;
    }

    const RowSet train_rows = arm_rows_of(ds, stage.train, t);
    if (train_rows.empty()) {
      throw DataError("arm t=" + std::to_string(t) + " is empty in the training fold");
    }

    LossSpec spec;
    if (e.alpha != 0.0 || e.beta != 0.0) spec.surrogate = e;

    if (reweight) {
      const Classifier pi_model = learner::fit_propensity(
          ds, stage.propensity, cfg.with_seed(derive_seed(seed, kTagPropensity, s)));
      const double p_t = static_cast<double>(train_rows.size()) /
                         static_cast<double>(stage.train.size());
      std::vector<double> pi_hat;
      pi_model.predict_rows(ds.x, train_rows, pi_hat);
      spec.weights.resize(train_rows.size());
      double mean = 0.0;
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        spec.weights[i] = learner::ipw_weight(t, p_t, pi_hat[i]);
        mean += spec.weights[i];
      }
      mean /= static_cast<double>(train_rows.size());
      // Self-normalize to mean one: stabilizes loss magnitudes and makes a
      // constant propensity reduce exactly to the unweighted objective.
      for (auto& w : spec.weights) w /= mean;
    }

    auto trained = learner::train(ds.x, ds.y, train_rows, spec,
                                  cfg.with_seed(derive_seed(seed, kTagTrain, s)));
    fit.models.push_back(std::move(trained.model));
  }

  if (learned) {
    fit.learned = ErrorParams{alpha_sum / static_cast<double>(stages.size()),
                              beta_sum / static_cast<double>(stages.size())};
  }
  return fit;
}

}  // namespace

ArmFit rwsl(const Dataset& ds, int t, const ParamSource& source,
            const TrainConfig& cfg, FitMode mode, RngSeed seed) {
  return fit_surrogate_arm(ds, t, source, cfg, mode, seed, /*reweight=*/true);
}

ArmFit surrogate_only(const Dataset& ds, int t, const ParamSource& source,
                      const TrainConfig& cfg, FitMode mode, RngSeed seed) {
  return fit_surrogate_arm(ds, t, source, cfg, mode, seed, /*reweight=*/false);
}

EstimatorKind preferred_target_estimator(const Dataset& ds) {
  return ds.has_oracle_targets() ? EstimatorKind::TPO : EstimatorKind::CT;
}

FittedEstimator fit_estimator(const EstimatorSpec& spec, const Dataset& ds,
                              const TrainConfig& cfg, RngSeed seed) {
  validate_dataset(ds);
  FittedEstimator out;
  out.kind = spec.kind;

  std::ostringstream prov;
  prov << spec.display_name() << "|n=" << ds.n() << "|d=" << ds.dim()
       << "|seed=" << seed << "|lr=" << cfg.learning_rate
       << "|epochs=" << cfg.epochs << "|batch=" << cfg.batch_size;
  out.prov.config_digest = digest_hex(prov.str());

  auto train_simple = [&](const RowSet& rows, std::span<const std::uint8_t> targets,
                          std::uint64_t tag) {
    if (rows.empty()) {
      throw DataError(spec.display_name() + ": no rows to train on");
    }
    return learner::train(ds.x, targets, rows, LossSpec{},
                          cfg.with_seed(derive_seed(seed, tag)))
        .model;
  };

  switch (spec.kind) {
    case EstimatorKind::UP: {
      auto model = train_simple(all_rows(ds), ds.y, kTagTrain);
      out.arms[0].push_back(model);
      out.arms[1].push_back(std::move(model));
      break;
    }
    case EstimatorKind::UT: {
      const BinaryColumn ystar = factual_targets(ds, "ut");
      auto model = train_simple(all_rows(ds), ystar, kTagTrain);
      out.arms[0].push_back(model);
      out.arms[1].push_back(std::move(model));
      break;
    }
    case EstimatorKind::CP: {
      for (int t = 0; t < 2; ++t) {
        out.arms[t].push_back(train_simple(rows_of_arm(ds, t), ds.y,
                                           t == 0 ? kTagArm0 : kTagArm1));
      }
      break;
    }
    case EstimatorKind::TPO: {
      require_targets(ds, "tpo");
      for (int t = 0; t < 2; ++t) {
        const BinaryColumn& target = t == 0 ? *ds.y_star_0 : *ds.y_star_1;
        out.arms[t].push_back(
            train_simple(all_rows(ds), target, t == 0 ? kTagArm0 : kTagArm1));
      }
      break;
    }
    case EstimatorKind::CT: {
      const BinaryColumn ystar = factual_targets(ds, "ct");
      for (int t = 0; t < 2; ++t) {
        out.arms[t].push_back(train_simple(rows_of_arm(ds, t), ystar,
                                           t == 0 ? kTagArm0 : kTagArm1));
      }
      break;
    }
    case EstimatorKind::SL:
    case EstimatorKind::RWSL: {
      const bool reweight = spec.kind == EstimatorKind::RWSL;
      for (int t = 0; t < 2; ++t) {
        ArmFit fit = fit_surrogate_arm(ds, t, spec.source, cfg, spec.mode,
                                       derive_seed(seed, t == 0 ? kTagArm0 : kTagArm1),
                                       reweight);
        (t == 0 ? out.prov.learned0 : out.prov.learned1) = fit.learned;
        out.arms[t] = std::move(fit.models);
      }
      break;
    }
  }
  return out;
}

}  // namespace ome::pipelines
