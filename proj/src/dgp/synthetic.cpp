#include "ome/dgp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ome::dgp {

namespace {

void check_domain(double x) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw DataError("x=" + std::to_string(x) + " outside the DGP support [-1, 1]");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Flip a target outcome into its proxy: 1 survives with prob 1-beta,
// 0 turns into 1 with prob alpha.
std::uint8_t flip_outcome(std::uint8_t y_star, const ErrorParams& e, Rng& rng) {
  if (y_star) return rng.bernoulli(e.beta) ? 0 : 1;
  return rng.bernoulli(e.alpha) ? 1 : 0;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (n < 1) throw ConfigError("synthetic config: n must be at least 1");
  error0.validate("synthetic config error0");
  error1.validate("synthetic config error1");
  if (constant_propensity &&
      !(*constant_propensity > 0.0 && *constant_propensity < 1.0)) {
    throw ConfigError("synthetic config: constant propensity must lie in (0, 1)");
  }
  // Scales above 1 are allowed as long as the scaled probability still fits
  // in [0, 1]; 1/sup(eta*_t) makes the max anchor hold exactly.
  if (!(target_scale_0 > 0.0 && target_scale_0 <= 1.05) ||
      !(target_scale_1 > 0.0 && target_scale_1 <= 1.0)) {
    throw ConfigError("synthetic config: target scale out of range");
  }
}

double eval_target_probability(int t, double x) {
  check_domain(x);
  if (t == 0) {
    // Piecewise sinusoid; the boundary point belongs to the left piece.
    if (x <= -0.237) {
      return clamp01(0.4 + 0.4 * std::cos(9.0 * x + 5.5));
    }
    return clamp01(0.5 + 0.3 * std::sin(8.0 * x + 0.9) +
                   0.15 * std::sin(10.0 * x + 0.2) +
                   0.05 * std::sin(30.0 * x + 0.2));
  }
  if (t == 1) {
    return clamp01(0.5 - 0.5 * std::sin(2.9 * x + 0.1));
  }
  throw DataError("treatment must be 0 or 1, got " + std::to_string(t));
}

double eval_propensity(double x) {
  check_domain(x);
  return 0.35 * x + 0.5;
}

Dataset sample_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  Dataset ds;
  ds.x = Matrix(cfg.n, 1);
  ds.t.resize(cfg.n);
  ds.y.resize(cfg.n);
  ds.y_star_0 = BinaryColumn(cfg.n);
  ds.y_star_1 = BinaryColumn(cfg.n);
  ds.y_0 = BinaryColumn(cfg.n);
  ds.y_1 = BinaryColumn(cfg.n);
  ds.fold.assign(cfg.n, -1);
  ds.covariate_names = {"x0"};

  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    ds.x(i, 0) = x;

    const std::uint8_t ys0 =
        rng.bernoulli(clamp01(cfg.target_scale_0 * eval_target_probability(0, x)))
            ? 1
            : 0;
    const std::uint8_t ys1 =
        rng.bernoulli(clamp01(cfg.target_scale_1 * eval_target_probability(1, x)))
            ? 1
            : 0;
    (*ds.y_star_0)[i] = ys0;
    (*ds.y_star_1)[i] = ys1;

    (*ds.y_0)[i] = flip_outcome(ys0, cfg.error0, rng);
    (*ds.y_1)[i] = flip_outcome(ys1, cfg.error1, rng);

    const double pi =
        cfg.constant_propensity ? *cfg.constant_propensity : eval_propensity(x);
    ds.t[i] = rng.bernoulli(pi) ? 1 : 0;
    ds.y[i] = ds.t[i] ? (*ds.y_1)[i] : (*ds.y_0)[i];
  }
  return ds;
}

}  // namespace ome::dgp
