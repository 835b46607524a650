#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ome/core/rng.hpp"
#include "ome/dgp/corruption.hpp"
#include "ome/dgp/synthetic.hpp"
#include "ome/measurement/anchors.hpp"
#include "ome/measurement/error_model.hpp"

using namespace ome;
using namespace ome::measurement;

TEST_CASE("proxy probability values") {
  CHECK(proxy_probability(0.5, {0, 0}) == doctest::Approx(0.5));
  CHECK(proxy_probability(0.0, {0.1, 0.3}) == doctest::Approx(0.1));
  CHECK(proxy_probability(0.5, {0.1, 0.3}) == doctest::Approx(0.40));
  CHECK(proxy_probability(1.0, {0.1, 0.3}) == doctest::Approx(0.7));
}

TEST_CASE("proxy probability is strictly increasing with positive slope") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    double a = rng.uniform(0, 0.95), b = rng.uniform(0, 0.95);
    if (a + b >= 1) continue;
    const ErrorParams e{a, b};
    double lo = rng.uniform(), hi = rng.uniform();
    if (lo > hi) std::swap(lo, hi);
    if (lo == hi) continue;
    CHECK(proxy_probability(hi, e) > proxy_probability(lo, e));
  }
}

TEST_CASE("inverse correction") {
  SUBCASE("no noise gives identity") {
    auto m = inverse_correction({0, 0});
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(0.0));
    CHECK(m[2] == doctest::Approx(0.0));
    CHECK(m[3] == doctest::Approx(1.0));
  }
  SUBCASE("symmetric 0.2 case") {
    auto m = inverse_correction({0.2, 0.2});
    CHECK(m[0] == doctest::Approx(0.8 / 0.6));
    CHECK(m[1] == doctest::Approx(-0.2 / 0.6));
    CHECK(m[2] == doctest::Approx(-0.2 / 0.6));
    CHECK(m[3] == doctest::Approx(0.8 / 0.6));
  }
  SUBCASE("singular when rates sum to one") {
    CHECK_THROWS_AS((inverse_correction({0.5, 0.5})), IdentificationError);
  }
  SUBCASE("product with the forward matrix is the identity") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
      double a = rng.uniform(0, 0.9), b = rng.uniform(0, 0.9);
      if (a + b >= 0.999) continue;
      const ErrorParams e{a, b};
      auto fwd = forward_matrix(e);
      auto inv = inverse_correction(e);
      const double prod[4] = {
          fwd[0] * inv[0] + fwd[1] * inv[2], fwd[0] * inv[1] + fwd[1] * inv[3],
          fwd[2] * inv[0] + fwd[3] * inv[2], fwd[2] * inv[1] + fwd[3] * inv[3]};
      CHECK(std::fabs(prod[0] - 1.0) < 1e-12);
      CHECK(std::fabs(prod[1]) < 1e-12);
      CHECK(std::fabs(prod[2]) < 1e-12);
      CHECK(std::fabs(prod[3] - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("confusion rates by hand") {
  BinaryColumn ref = {0, 0, 1, 1};
  BinaryColumn y = {1, 0, 0, 1};
  auto c = confusion_against(ref, y);
  CHECK(c.fpr == doctest::Approx(0.5));
  CHECK(c.fnr == doctest::Approx(0.5));
  CHECK(c.n == 4);

  auto perfect = confusion_against(ref, ref);
  CHECK(perfect.fpr == doctest::Approx(0.0));
  CHECK(perfect.fnr == doctest::Approx(0.0));

  BinaryColumn all_pos = {1, 1, 1};
  CHECK_THROWS_AS(confusion_against(all_pos, all_pos), DataError);
}

TEST_CASE("by-treatment slice exposes arm-dependent rates") {
  // Build data where the treated arm has a much higher fpr / lower fnr than
  // the control arm, the pattern that motivates the treatment-conditional
  // error model.
  Rng rng(3);
  Dataset ds;
  const std::size_t n = 40000;
  ds.x = Matrix(n, 1);
  ds.t.resize(n);
  ds.y.resize(n);
  ds.y_star_0 = BinaryColumn(n);
  ds.y_star_1 = BinaryColumn(n);
  ds.fold.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    ds.x(i, 0) = rng.uniform(-1, 1);
    ds.t[i] = rng.bernoulli(0.5);
    const bool target = rng.bernoulli(0.5);
    (*ds.y_star_0)[i] = target;
    (*ds.y_star_1)[i] = target;
    const double fpr = ds.t[i] ? 0.64 : 0.37;
    const double fnr = ds.t[i] ? 0.13 : 0.38;
    ds.y[i] = target ? (rng.bernoulli(fnr) ? 0 : 1) : (rng.bernoulli(fpr) ? 1 : 0);
  }
  auto slices = empirical_error_rates(ds, Slice::ByTreatment);
  REQUIRE(slices.size() == 2);
  CHECK(slices[0].fpr == doctest::Approx(0.37).epsilon(0.05));
  CHECK(slices[0].fnr == doctest::Approx(0.38).epsilon(0.05));
  CHECK(slices[1].fpr == doctest::Approx(0.64).epsilon(0.05));
  CHECK(slices[1].fnr == doctest::Approx(0.13).epsilon(0.08));

  auto all = empirical_error_rates(ds, Slice::All);
  REQUIRE(all.size() == 1);
  CHECK(all[0].n == n);
  CHECK(all[0].fpr > slices[0].fpr);
  CHECK(all[0].fpr < slices[1].fpr);
}

TEST_CASE("empirical rates recover flip_labels configuration") {
  dgp::SyntheticConfig cfg;
  cfg.n = 30000;
  cfg.seed = 41;
  auto ds = dgp::sample_synthetic(cfg);
  auto flipped = dgp::flip_labels(ds, {0.25, 0.15}, {0.05, 0.3}, 77);
  auto slices = empirical_error_rates(flipped, Slice::ByTreatment);
  const double tol =
      3.0 * std::sqrt(0.25 * 0.75 / (0.25 * flipped.n()));  // coarse 3-sigma
  CHECK(std::fabs(slices[0].fpr - 0.25) < tol);
  CHECK(std::fabs(slices[0].fnr - 0.15) < tol);
  CHECK(std::fabs(slices[1].fpr - 0.05) < tol);
  CHECK(std::fabs(slices[1].fnr - 0.30) < tol);
}

TEST_CASE("threshold_at_percentile") {
  std::vector<double> scores = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto bin = threshold_at_percentile(scores, 0.55);
  std::size_t above = 0;
  for (auto b : bin) above += b;
  CHECK(above == 4);  // values above the 55th-percentile cut
  CHECK_THROWS_AS((threshold_at_percentile({}, 0.5)), DataError);
  CHECK_THROWS_AS(threshold_at_percentile(scores, 1.5), ConfigError);
}

TEST_CASE("identifiability table") {
  using A = AnchorType;
  auto ok = [](A a, A b) { return check_identifiable(a, b); };
  // diagonal never identifies
  for (A t : {A::KnownAlpha, A::Min, A::BaseRate, A::Max, A::KnownBeta}) {
    CHECK_FALSE(ok(t, t));
  }
  // known alpha row
  CHECK_FALSE(ok(A::KnownAlpha, A::Min));
  CHECK(ok(A::KnownAlpha, A::BaseRate));
  CHECK(ok(A::KnownAlpha, A::Max));
  CHECK(ok(A::KnownAlpha, A::KnownBeta));
  // min row
  CHECK(ok(A::Min, A::BaseRate));
  CHECK(ok(A::Min, A::Max));
  CHECK(ok(A::Min, A::KnownBeta));
  // base rate row
  CHECK(ok(A::BaseRate, A::Max));
  CHECK(ok(A::BaseRate, A::KnownBeta));
  // max row
  CHECK_FALSE(ok(A::Max, A::KnownBeta));
  // symmetry
  CHECK(ok(A::Max, A::KnownAlpha) == ok(A::KnownAlpha, A::Max));
  CHECK(ok(A::Min, A::KnownAlpha) == ok(A::KnownAlpha, A::Min));
}

TEST_CASE("identify_from_anchors closed forms") {
  auto e1 = identify_from_anchors({0.0, 0.1}, {1.0, 0.7});
  CHECK(e1.alpha == doctest::Approx(0.1));
  CHECK(e1.beta == doctest::Approx(0.3));

  auto e2 = identify_from_anchors({0.0, 0.0}, {1.0, 1.0});
  CHECK(e2.alpha == doctest::Approx(0.0));
  CHECK(e2.beta == doctest::Approx(0.0));

  auto e3 = identify_from_anchors({0.5, 0.4}, {0.0, 0.1});
  CHECK(e3.alpha == doctest::Approx(0.1));
  CHECK(e3.beta == doctest::Approx(0.3));

  CHECK_THROWS_AS((identify_from_anchors({0.5, 0.4}, {0.5, 0.2})),
                  IdentificationError);
  // a solution outside the valid region is rejected, not clipped
  CHECK_THROWS_AS((identify_from_anchors({0.0, 0.6}, {1.0, 0.4})),
                  IdentificationError);
}

TEST_CASE("identify_with_known closed forms") {
  auto e1 = identify_with_known_alpha(0.1, {1.0, 0.7});
  CHECK(e1.beta == doctest::Approx(0.3));

  auto e2 = identify_with_known_beta(0.0, {0.0, 0.0});
  CHECK(e2.alpha == doctest::Approx(0.0));

  CHECK_THROWS_AS((identify_with_known_alpha(0.1, {0.0, 0.1})),
                  IdentificationError);
  CHECK_THROWS_AS((identify_with_known_beta(0.1, {1.0, 0.9})),
                  IdentificationError);
}

TEST_CASE("anchor_to_point statistics") {
  const std::vector<double> inf = {0.12, 0.3, 0.08};
  auto mn = anchor_to_point(AnchorSpec::min(), inf);
  CHECK(mn.c_star == 0.0);
  CHECK(mn.c == doctest::Approx(0.08));

  auto mx = anchor_to_point(AnchorSpec::max(), {std::vector<double>{0.12, 0.9}});
  CHECK(mx.c_star == 1.0);
  CHECK(mx.c == doctest::Approx(0.9));

  auto br = anchor_to_point(AnchorSpec::base_rate(0.5),
                            {std::vector<double>{0.2, 0.6}});
  CHECK(br.c_star == doctest::Approx(0.5));
  CHECK(br.c == doctest::Approx(0.4));

  CHECK_THROWS_AS((anchor_to_point(AnchorSpec::min(), {})), DataError);
  CHECK_THROWS_AS(anchor_to_point(AnchorSpec::known_alpha(0.1), inf), ConfigError);
}

TEST_CASE("round trip: every identifiable pair recovers exact parameters") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    double a = rng.uniform(0, 0.95), b = rng.uniform(0, 0.95);
    if (a + b >= 0.999) continue;
    const ErrorParams truth{a, b};

    // synthesize anchor inferences covering [0,1] target probabilities
    double br_value = rng.uniform(0.05, 0.95);
    std::vector<double> inferences = {proxy_probability(0.0, truth),
                                      proxy_probability(1.0, truth),
                                      proxy_probability(br_value, truth)};
    // the base-rate proxy mean must equal eta at the base rate: use a
    // two-point sample symmetric around br_value
    double lo = br_value / 2, hi = (1.0 + br_value) / 2;
    std::vector<double> br_inferences = {proxy_probability(0.0, truth),
                                         proxy_probability(1.0, truth),
                                         proxy_probability(lo, truth),
                                         proxy_probability(hi, truth)};
    // mean of all four = proxy at mean target (affinity); adjust br target
    const double br_target = (0.0 + 1.0 + lo + hi) / 4.0;

    auto close = [&](const ErrorParams& e) {
      CHECK(std::fabs(e.alpha - a) < 1e-10);
      CHECK(std::fabs(e.beta - b) < 1e-10);
    };
    close(identify(AnchorSpec::min(), AnchorSpec::max(), inferences));
    close(identify(AnchorSpec::min(), AnchorSpec::known_beta(b), inferences));
    close(identify(AnchorSpec::max(), AnchorSpec::known_alpha(a), inferences));
    close(identify(AnchorSpec::known_alpha(a), AnchorSpec::known_beta(b),
                   inferences));
    close(identify(AnchorSpec::base_rate(br_target), AnchorSpec::min(),
                   br_inferences));
    close(identify(AnchorSpec::base_rate(br_target), AnchorSpec::max(),
                   br_inferences));
    close(identify(AnchorSpec::base_rate(br_target), AnchorSpec::known_alpha(a),
                   br_inferences));
    close(identify(AnchorSpec::base_rate(br_target), AnchorSpec::known_beta(b),
                   br_inferences));
  }
}

TEST_CASE("non-identifiable pairs are rejected before any work") {
  const std::vector<double> inf = {0.1, 0.5, 0.9};
  CHECK_THROWS_AS(identify(AnchorSpec::min(), AnchorSpec::min(), inf),
                  IdentificationError);
  CHECK_THROWS_AS(identify(AnchorSpec::known_alpha(0.1), AnchorSpec::min(), inf),
                  IdentificationError);
  CHECK_THROWS_AS(identify(AnchorSpec::known_beta(0.1), AnchorSpec::max(), inf),
                  IdentificationError);
  CHECK_THROWS_AS(
      identify(AnchorSpec::base_rate(0.4), AnchorSpec::base_rate(0.6), inf),
      IdentificationError);
}

TEST_CASE("robust extraction quantiles") {
  std::vector<double> inf(1000);
  for (std::size_t i = 0; i < inf.size(); ++i) {
    inf[i] = 0.2 + 0.6 * double(i) / double(inf.size() - 1);
  }
  inf[0] = 0.01;   // dip artifact
  inf[999] = 0.99; // spike artifact
  AnchorExtraction robust{0.01, 0.99};
  auto mn = anchor_to_point(AnchorSpec::min(), inf, robust);
  auto mx = anchor_to_point(AnchorSpec::max(), inf, robust);
  CHECK(mn.c > 0.15);
  CHECK(mx.c < 0.85);
  // exact mode picks the artifacts up
  CHECK(anchor_to_point(AnchorSpec::min(), inf).c == doctest::Approx(0.01));
  CHECK(anchor_to_point(AnchorSpec::max(), inf).c == doctest::Approx(0.99));
}
