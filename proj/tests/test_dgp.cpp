#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ome/dgp/corruption.hpp"
#include "ome/dgp/synthetic.hpp"
#include "ome/measurement/error_model.hpp"

using namespace ome;
using namespace ome::dgp;

namespace {

// 3-sigma binomial tolerance for an empirical rate.
double binom3(double p, std::size_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

TEST_CASE("target probability frozen values") {
  CHECK(eval_target_probability(0, -1.0) == doctest::Approx(0.0254173).epsilon(1e-4));
  CHECK(eval_target_probability(0, 0.0) == doctest::Approx(0.7747319).epsilon(1e-4));
  CHECK(eval_target_probability(1, 0.0) == doctest::Approx(0.4500833).epsilon(1e-4));
  // sine peak forces the infimum of the treated arm
  const double x_star = (M_PI / 2 - 0.1) / 2.9;
  CHECK(eval_target_probability(1, x_star) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("target probability domain errors") {
  CHECK_THROWS_AS(eval_target_probability(0, -1.01), DataError);
  CHECK_THROWS_AS(eval_target_probability(1, 1.5), DataError);
  CHECK_THROWS_AS(eval_target_probability(2, 0.0), DataError);
}

TEST_CASE("propensity values and domain") {
  CHECK(eval_propensity(0.0) == doctest::Approx(0.5));
  CHECK(eval_propensity(1.0) == doctest::Approx(0.85));
  CHECK(eval_propensity(-1.0) == doctest::Approx(0.15));
  CHECK_THROWS_AS(eval_propensity(2.0), DataError);
}

TEST_CASE("positivity holds on the support") {
  for (int i = 0; i <= 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 1000.0;
    const double pi = eval_propensity(x);
    CHECK(pi >= 0.15);
    CHECK(pi <= 0.85);
  }
}

TEST_CASE("anchor attainment on a dense grid") {
  // The control-arm formula attains its minimum of 0 but tops out near
  // 0.9533, so only the min anchor holds exactly for t=0; the treated arm
  // attains both extremes.
  double inf0 = 1e9, sup0 = -1e9, inf1 = 1e9, sup1 = -1e9;
  const int grid = 200000;
  for (int i = 0; i <= grid; ++i) {
    const double x = -1.0 + 2.0 * i / grid;
    inf0 = std::min(inf0, eval_target_probability(0, x));
    sup0 = std::max(sup0, eval_target_probability(0, x));
    inf1 = std::min(inf1, eval_target_probability(1, x));
    sup1 = std::max(sup1, eval_target_probability(1, x));
  }
  CHECK(inf0 <= 1e-3);
  CHECK(inf1 <= 1e-3);
  CHECK(sup1 >= 1.0 - 1e-3);
  CHECK(sup0 == doctest::Approx(0.95325446).epsilon(1e-4));
}

TEST_CASE("sample_synthetic determinism and zero-noise identity") {
  SyntheticConfig cfg;
  cfg.n = 5000;
  cfg.seed = 11;
  auto a = sample_synthetic(cfg);
  auto b = sample_synthetic(cfg);
  CHECK(a.x == b.x);
  CHECK(a.t == b.t);
  CHECK(a.y == b.y);
  CHECK(*a.y_0 == *b.y_0);

  for (std::size_t i = 0; i < a.n(); ++i) {
    CHECK((*a.y_0)[i] == (*a.y_star_0)[i]);
    CHECK((*a.y_1)[i] == (*a.y_star_1)[i]);
  }
}

TEST_CASE("sample_synthetic empirical flip rates") {
  SyntheticConfig cfg;
  cfg.n = 60000;
  cfg.error0 = {0.4, 0.0};
  cfg.seed = 17;
  auto ds = sample_synthetic(cfg);
  std::size_t neg = 0, flipped = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if ((*ds.y_star_0)[i] == 0) {
      ++neg;
      flipped += (*ds.y_0)[i];
    }
  }
  const double rate = double(flipped) / double(neg);
  CHECK(rate == doctest::Approx(0.4).epsilon(0.01 / 0.4));
}

TEST_CASE("eq-1 relation between analytic functions and samples") {
  SyntheticConfig cfg;
  cfg.n = 120000;
  cfg.error0 = {0.2, 0.3};
  cfg.seed = 13;
  auto ds = sample_synthetic(cfg);
  // empirical P(Y_0=1 | x in window) matches (1-b)*eta0 + a*(1-eta0)
  for (double center : {-0.7, 0.0, 0.6}) {
    std::size_t n = 0, pos = 0;
    double eta_sum = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      const double x = ds.x(i, 0);
      if (std::fabs(x - center) < 0.05) {
        ++n;
        pos += (*ds.y_0)[i];
        eta_sum += measurement::proxy_probability(eval_target_probability(0, x),
                                                  cfg.error0);
      }
    }
    REQUIRE(n > 500);
    const double expected = eta_sum / double(n);
    CHECK(double(pos) / double(n) ==
          doctest::Approx(expected).epsilon(binom3(expected, n) / expected));
  }
}

TEST_CASE("treatment assignment follows the propensity") {
  SyntheticConfig cfg;
  cfg.n = 100000;
  cfg.seed = 23;
  auto ds = sample_synthetic(cfg);
  std::size_t n = 0, treated = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (ds.x(i, 0) > 0.7) {
      ++n;
      treated += ds.t[i];
    }
  }
  // mean propensity over (0.7, 1) is 0.7975
  CHECK(double(treated) / double(n) == doctest::Approx(0.7975).epsilon(0.02));
}

TEST_CASE("constant propensity override") {
  SyntheticConfig cfg;
  cfg.n = 50000;
  cfg.seed = 29;
  cfg.constant_propensity = 0.5;
  auto ds = sample_synthetic(cfg);
  double treated = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) treated += ds.t[i];
  CHECK(treated / double(ds.n()) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("flip_labels identity and invariant enforcement") {
  SyntheticConfig cfg;
  cfg.n = 300;
  cfg.seed = 3;
  auto ds = sample_synthetic(cfg);

  auto same = flip_labels(ds, {0, 0}, {0, 0}, 99);
  CHECK(*same.y_0 == *ds.y_star_0);
  CHECK(*same.y_1 == *ds.y_star_1);
  CHECK(same.y == ds.y);

  CHECK_THROWS_AS((flip_labels(ds, {1.0, 0.0}, {0, 0}, 99)), ConfigError);

  Dataset no_targets = ds;
  no_targets.y_star_0.reset();
  no_targets.y_star_1.reset();
  CHECK_THROWS_AS((flip_labels(no_targets, {0.1, 0.1}, {0, 0}, 99)), DataError);
}

TEST_CASE("flip_labels empirical rates and target immutability") {
  SyntheticConfig cfg;
  cfg.n = 10000;
  cfg.seed = 31;
  auto ds = sample_synthetic(cfg);
  auto flipped = flip_labels(ds, {0.3, 0.1}, {0, 0}, 55);

  CHECK(*flipped.y_star_0 == *ds.y_star_0);
  CHECK(*flipped.y_star_1 == *ds.y_star_1);

  std::size_t neg = 0, fp = 0, pos = 0, fn = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if ((*ds.y_star_0)[i] == 0) {
      ++neg;
      fp += (*flipped.y_0)[i];
    } else {
      ++pos;
      fn += 1 - (*flipped.y_0)[i];
    }
  }
  CHECK(double(fp) / double(neg) == doctest::Approx(0.3).epsilon(0.02 / 0.3));
  CHECK(double(fn) / double(pos) == doctest::Approx(0.1).epsilon(0.02 / 0.1));

  // observed y rebuilt by consistency
  for (std::size_t i = 0; i < ds.n(); ++i) {
    CHECK(flipped.y[i] ==
          (flipped.t[i] ? (*flipped.y_1)[i] : (*flipped.y_0)[i]));
  }
}

TEST_CASE("inject_selection_bias") {
  SyntheticConfig cfg;
  cfg.n = 20000;
  cfg.seed = 37;
  auto ds = sample_synthetic(cfg);

  SUBCASE("empty rule keeps everything") {
    SelectionRule rule{1, 0, SelectionRule::Op::Greater, 2.0};
    auto kept = inject_selection_bias(ds, rule);
    CHECK(kept.n() == ds.n());
  }

  SUBCASE("threshold rule shifts the treated covariate mean") {
    double mean1_before = 0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.t[i]) mean1_before += ds.x(i, 0), ++n1;
    }
    mean1_before /= double(n1);

    SelectionRule rule{1, 0, SelectionRule::Op::Greater, -0.5};
    auto biased = inject_selection_bias(ds, rule);
    double mean1 = 0, mean0 = 0;
    std::size_t c1 = 0, c0 = 0;
    for (std::size_t i = 0; i < biased.n(); ++i) {
      if (biased.t[i]) mean1 += biased.x(i, 0), ++c1;
      else mean0 += biased.x(i, 0), ++c0;
    }
    mean1 /= double(c1);
    mean0 /= double(c0);
    CHECK(c1 < n1);
    CHECK(mean1 < mean1_before);
    CHECK(mean1 < mean0);
    // no treated row above the threshold survives
    for (std::size_t i = 0; i < biased.n(); ++i) {
      if (biased.t[i]) CHECK(biased.x(i, 0) <= -0.5);
    }
  }

  SUBCASE("removing an entire arm fails") {
    SelectionRule rule{1, 0, SelectionRule::Op::GreaterEq, -2.0};
    CHECK_THROWS_AS(inject_selection_bias(ds, rule), DataError);
  }
}

TEST_CASE("adopt_observed_as_target fills factual targets") {
  SyntheticConfig cfg;
  cfg.n = 100;
  cfg.seed = 5;
  auto ds = sample_synthetic(cfg);
  Dataset raw = ds;
  raw.y_star_0.reset();
  raw.y_star_1.reset();
  raw.y_0.reset();
  raw.y_1.reset();
  auto promoted = adopt_observed_as_target(raw);
  for (std::size_t i = 0; i < promoted.n(); ++i) {
    CHECK(promoted.factual_target(i) == raw.y[i]);
  }
}
