#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ome/dgp/synthetic.hpp"
#include "ome/eval/metrics.hpp"
#include "ome/eval/sweep.hpp"

using namespace ome;
using namespace ome::eval;
using pipelines::EstimatorKind;
using pipelines::EstimatorSpec;
using pipelines::FittedEstimator;

namespace {

// One saturated tanh unit scaled up: predicts sigmoid(50*tanh(1000*x)), an
// effectively hard threshold at x = 0 with ties mapping to 0.5.
learner::Classifier step_classifier() {
  learner::Classifier m(1, std::vector<std::size_t>{1}, learner::Activation::Tanh, 0);
  auto& p = m.params();
  std::fill(p.begin(), p.end(), 0.0);
  const auto layers = m.layers();
  p[layers[0].w_off] = 1000.0;  // hidden weight
  p[layers[1].w_off] = 50.0;    // output weight
  return m;
}

learner::Classifier constant_classifier(double logit) {
  learner::Classifier m(1, std::vector<std::size_t>{1}, learner::Activation::Tanh, 0);
  auto& p = m.params();
  std::fill(p.begin(), p.end(), 0.0);
  p[m.layers()[1].b_off] = logit;  // output bias only
  return m;
}

Dataset labeled_by_sign(std::size_t n, RngSeed seed) {
  Rng rng(seed);
  Dataset ds;
  ds.x = Matrix(n, 1);
  ds.t.resize(n);
  ds.y.resize(n);
  ds.y_star_0 = BinaryColumn(n);
  ds.y_star_1 = BinaryColumn(n);
  ds.fold.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    ds.x(i, 0) = rng.uniform(-1, 1);
    ds.t[i] = rng.bernoulli(0.5);
    (*ds.y_star_0)[i] = ds.x(i, 0) >= 0.0;
    (*ds.y_star_1)[i] = ds.x(i, 0) >= 0.0;
    ds.y[i] = ds.factual_target(i);
  }
  return ds;
}

}  // namespace

TEST_CASE("accuracy of a perfect predictor is one") {
  auto test = labeled_by_sign(2000, 3);
  FittedEstimator est;
  est.kind = EstimatorKind::TPO;
  est.arms[0] = {step_classifier()};
  est.arms[1] = {step_classifier()};
  auto report = accuracy_on_target(est, test, 0);
  CHECK(report.value == doctest::Approx(1.0));
  CHECK(report.metric == "accuracy_on_target_0");
  CHECK(report.runs == 1);
}

TEST_CASE("a constant half predictor scores the positive rate, ties go to 1") {
  auto test = labeled_by_sign(5000, 5);
  FittedEstimator est;
  est.kind = EstimatorKind::UP;
  est.arms[0] = {constant_classifier(0.0)};  // predicts exactly 0.5
  est.arms[1] = est.arms[0];
  auto report = accuracy_on_target(est, test, 0);
  double positive = 0;
  for (auto v : *test.y_star_0) positive += v;
  CHECK(report.value == doctest::Approx(positive / test.n()));
  CHECK(report.value == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("accuracy requires oracle targets") {
  auto test = labeled_by_sign(100, 7);
  test.y_star_0.reset();
  test.y_star_1.reset();
  FittedEstimator est;
  est.arms[0] = {step_classifier()};
  est.arms[1] = {step_classifier()};
  CHECK_THROWS_AS(accuracy_on_target(est, test, 0), DataError);
}

TEST_CASE("ate bias of a no-effect estimator equals the true effect") {
  auto test = labeled_by_sign(1000, 9);
  FittedEstimator est;
  est.arms[0] = {constant_classifier(-1.0)};
  est.arms[1] = est.arms[0];
  auto report = ate_bias(est, test, 0.17);
  CHECK(report.value == doctest::Approx(0.17));
}

TEST_CASE("ate bias vanishes when predictions match the potential outcomes") {
  auto test = labeled_by_sign(20000, 11);
  // arm 1 outcomes are the sign indicator, arm 0 outcomes all zero
  for (std::size_t i = 0; i < test.n(); ++i) (*test.y_star_0)[i] = 0;
  FittedEstimator est;
  est.arms[0] = {constant_classifier(-60.0)};  // ~0
  est.arms[1] = {step_classifier()};
  const double tau = oracle_ate(test);
  auto report = ate_bias(est, test, tau);
  CHECK(std::fabs(report.value) < 2e-3);
}

TEST_CASE("sweep cell seeds are pure functions of the cell coordinates") {
  SweepSpec spec;
  spec.axis = SweepSpec::Axis::SampleSize;
  spec.sizes = {300, 700};
  spec.repetitions = 2;
  spec.base.n = 300;
  spec.base.seed = 99;
  EstimatorSpec up;
  up.kind = EstimatorKind::UP;
  spec.estimators = {up};
  spec.train.hidden = {8, 4};
  spec.test_n = 500;

  CHECK(cell_seed(spec, 0, 1) == cell_seed(spec, 0, 1));
  CHECK(cell_seed(spec, 0, 1) != cell_seed(spec, 1, 1));
  CHECK(cell_seed(spec, 0, 1) != cell_seed(spec, 0, 0));

  auto a = run_sweep_cell(spec, 1, 0, nullptr);
  auto b = run_sweep_cell(spec, 1, 0, nullptr);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].estimator == b[i].estimator);
  }
}

TEST_CASE("aggregation computes mean and stderr per estimator and metric") {
  auto mk = [](double v) {
    MetricReport r;
    r.estimator = "up";
    r.metric = "accuracy_on_target_0";
    r.axis = "n";
    r.axis_value = 100;
    r.value = v;
    return r;
  };
  std::vector<std::vector<MetricReport>> cells = {{mk(0.5)}, {mk(0.6)}, {mk(0.7)}};
  auto out = aggregate_cells(cells);
  REQUIRE(out.size() == 1);
  CHECK(out[0].runs == 3);
  CHECK(out[0].value == doctest::Approx(0.6));
  // stderr = sd / sqrt(runs) with the n-1 sample deviation
  CHECK(out[0].stderr_value == doctest::Approx(0.1 / std::sqrt(3.0)));
}

TEST_CASE("sweep records estimator failures without aborting") {
  SweepSpec spec;
  spec.axis = SweepSpec::Axis::ErrorGrid;
  spec.error_settings = {{0.1, 0.1}};
  spec.repetitions = 1;
  spec.base.n = 900;
  spec.base.seed = 41;
  spec.train.hidden = {8, 4};
  spec.test_n = 400;

  EstimatorSpec up;
  up.kind = EstimatorKind::UP;
  EstimatorSpec doomed;
  doomed.kind = EstimatorKind::RWSL;
  doomed.mode = pipelines::FitMode::Split;
  doomed.source = pipelines::ParamSource::learned(
      measurement::AnchorSpec::known_alpha(0.7),
      measurement::AnchorSpec::known_beta(0.7));
  spec.estimators = {up, doomed};

  auto result = run_sweep(spec);
  bool has_up = false;
  for (const auto& r : result.reports) has_up |= r.estimator == "up";
  CHECK(has_up);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].estimator == "rwsl_known_alpha_known_beta");
}

TEST_CASE("small end-to-end sweep aggregates the grid") {
  SweepSpec spec;
  spec.axis = SweepSpec::Axis::SampleSize;
  spec.sizes = {300, 600};
  spec.repetitions = 2;
  spec.base.seed = 7;
  spec.train.hidden = {8, 4};
  spec.test_n = 500;
  EstimatorSpec up;
  up.kind = EstimatorKind::UP;
  EstimatorSpec tpo;
  tpo.kind = EstimatorKind::TPO;
  spec.estimators = {up, tpo};

  auto result = run_sweep(spec);
  CHECK(result.failures.empty());
  // 2 axis values x 2 estimators x 1 metric
  CHECK(result.reports.size() == 4);
  for (const auto& r : result.reports) {
    CHECK(r.runs == 2);
    CHECK(r.value > 0.0);
    CHECK(r.value <= 1.0);
    CHECK(r.axis == "n");
  }
}

TEST_CASE("oracle ate of balanced sign labels is near zero") {
  auto test = labeled_by_sign(40000, 13);
  CHECK(std::fabs(oracle_ate(test)) < 1e-9);  // identical potential outcomes
}
