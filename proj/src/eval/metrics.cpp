#include "ome/eval/metrics.hpp"

namespace ome::eval {

MetricReport accuracy_on_target(const pipelines::FittedEstimator& est,
                                const Dataset& test, int t) {
  if (!test.has_oracle_targets()) {
    throw DataError("accuracy_on_target requires oracle target columns");
  }
  const BinaryColumn& target = t == 0 ? *test.y_star_0 : *test.y_star_1;
  std::vector<double> preds;
  est.predict_arm_rows(t, test.x, all_rows(test), preds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < test.n(); ++i) {
    const std::uint8_t label = preds[i] >= 0.5 ? 1 : 0;
    hits += label == target[i];
  }
  MetricReport r;
  r.estimator = pipelines::estimator_name(est.kind);
  r.metric = "accuracy_on_target_" + std::to_string(t);
  r.value = static_cast<double>(hits) / static_cast<double>(test.n());
  r.config_digest = est.prov.config_digest;
  return r;
}

MetricReport ate_bias(const pipelines::FittedEstimator& est, const Dataset& test,
                      double tau_true) {
  std::vector<double> p1, p0;
  const RowSet rows = all_rows(test);
  est.predict_arm_rows(1, test.x, rows, p1);
  est.predict_arm_rows(0, test.x, rows, p0);
  double tau_hat = 0.0;
  for (std::size_t i = 0; i < test.n(); ++i) tau_hat += p1[i] - p0[i];
  tau_hat /= static_cast<double>(test.n());

  MetricReport r;
  r.estimator = pipelines::estimator_name(est.kind);
  r.metric = "ate_bias";
  r.value = tau_true - tau_hat;
  r.config_digest = est.prov.config_digest;
  return r;
}

double oracle_ate(const Dataset& test) {
  if (!test.has_oracle_targets()) {
    throw DataError("oracle_ate requires oracle target columns");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < test.n(); ++i) {
    sum += static_cast<double>((*test.y_star_1)[i]) -
           static_cast<double>((*test.y_star_0)[i]);
  }
  return sum / static_cast<double>(test.n());
}

}  // namespace ome::eval
