#pragma once

#include <array>
#include <optional>
#include <string>

#include "ome/core/dataset.hpp"
#include "ome/core/folds.hpp"
#include "ome/learner/train.hpp"
#include "ome/measurement/anchors.hpp"

namespace ome::pipelines {

// UP: observed proxy, unconditional on treatment.  UT: factual target,
// unconditional.  CP: per-arm proxy regression.  SL: per-arm surrogate loss
// without re-weighting.  RWSL: re-weighted surrogate loss.  TPO: per-arm
// oracle potential-outcome regression.  CT: per-arm factual-target
// regression.
enum class EstimatorKind { UP, UT, CP, SL, RWSL, TPO, CT };

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

// Where SL/RWSL get their error parameters: supplied (oracle) or estimated
// from an identifiable anchor pair (learned).
struct ParamSource {
  enum class Kind { Oracle, Learned } kind = Kind::Oracle;
  ErrorParams oracle0, oracle1;
  measurement::AnchorSpec anchor_a, anchor_b;

  static ParamSource oracle(const ErrorParams& e0, const ErrorParams& e1);
  static ParamSource learned(const measurement::AnchorSpec& a,
                             const measurement::AnchorSpec& b);
  void validate() const;
};

// How SL/RWSL use folds. Single: every stage sees all training rows
// (RCT-style runs where splitting starves small arms). Split: disjoint
// thirds for parameters / propensity / risk minimization. CrossFit: rotate
// the fold roles and average the three fitted models.
enum class FitMode { Single, Split, CrossFit };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::UP;
  ParamSource source;       // read for SL / RWSL only
  FitMode mode = FitMode::CrossFit;

  std::string display_name() const;
};

struct Provenance {
  std::string config_digest;
  std::optional<ErrorParams> learned0, learned1;  // CCPE outputs, if any
};

// Per-arm prediction ensemble. UP/UT place their single unconditional model
// in both arm slots; cross-fitting stores the three rotation models and
// predictions average them.
struct FittedEstimator {
  EstimatorKind kind = EstimatorKind::UP;
  std::array<std::vector<learner::Classifier>, 2> arms;
  Provenance prov;

  double predict_arm(int t, std::span<const double> x) const;
  void predict_arm_rows(int t, const Matrix& x,
                        std::span<const std::int32_t> rows,
                        std::vector<double>& out) const;
};

// Conditional class probability estimation over `rows`: splits them in two,
// regresses Y ~ X | T = t on the first half, converts held-out inferences
// into anchor points on the second, and solves for the error parameters.
// Identification failures (anchor violations) propagate as
// IdentificationError.
ErrorParams ccpe(const Dataset& ds, const RowSet& rows, int t,
                 const measurement::AnchorSpec& a,
                 const measurement::AnchorSpec& b,
                 const learner::TrainConfig& cfg, RngSeed seed);

// Runs both fold orderings and averages the two estimates.
ErrorParams ccpe_crossfit(const Dataset& ds, const RowSet& rows, int t,
                          const measurement::AnchorSpec& a,
                          const measurement::AnchorSpec& b,
                          const learner::TrainConfig& cfg, RngSeed seed);

struct ArmFit {
  std::vector<learner::Classifier> models;
  std::optional<ErrorParams> learned;
};

// Re-weighted risk minimization with surrogate loss for one arm: estimate
// (alpha_t, beta_t) (CCPE or oracle), fit the propensity, then minimize the
// re-weighted surrogate risk on held-out rows per the fit mode. Weights are
// self-normalized to mean one within the arm, so a constant propensity
// reduces RWSL to SL exactly.
ArmFit rwsl(const Dataset& ds, int t, const ParamSource& source,
            const learner::TrainConfig& cfg, FitMode mode, RngSeed seed);

// SL ablation: the surrogate loss over the arm population without
// re-weighting. Shares fold structure and seeds with rwsl, so learned
// parameter estimates coincide between the two within a run.
ArmFit surrogate_only(const Dataset& ds, int t, const ParamSource& source,
                      const learner::TrainConfig& cfg, FitMode mode,
                      RngSeed seed);

// Fits any estimator kind. Missing-column errors name the requirement.
FittedEstimator fit_estimator(const EstimatorSpec& spec, const Dataset& ds,
                              const learner::TrainConfig& cfg, RngSeed seed);

// TPO when counterfactual targets are available, CT otherwise.
EstimatorKind preferred_target_estimator(const Dataset& ds);

}  // namespace ome::pipelines
