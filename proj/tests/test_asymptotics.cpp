#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "strebel/asymptotics.hpp"
#include "support/fixtures.hpp"

using namespace strebel;
using doctest::Approx;

namespace {
const double kHalfLog2 = 0.34657359027997264;
const double kQuarterLog2 = 0.17328679513998632;
}  // namespace

TEST_CASE("modulus ratio term on the reference pair") {
  std::vector<double> m{1.0, 2.0}, mp{2.0, 2.0};
  CHECK(modulus_ratio_term(m, mp) == Approx(kHalfLog2).epsilon(1e-15));
  // swapping sides leaves the symmetric max unchanged
  CHECK(modulus_ratio_term(mp, m) == Approx(kHalfLog2).epsilon(1e-15));
  // identical moduli: zero
  CHECK(modulus_ratio_term(mp, mp) == 0.0);
}

TEST_CASE("detour metric and optimal shift") {
  std::vector<double> m{1.0, 2.0}, mp{2.0, 2.0};
  // max up-ratio 2, max down-ratio 1
  CHECK(detour_metric(m, mp) == Approx(kHalfLog2).epsilon(1e-15));
  CHECK(optimal_shift(m, mp) == Approx(-kQuarterLog2).epsilon(1e-15));

  // one cylinder, m = 1 vs m' = 4: detour vanishes, and the optimal shift
  // rescales the right modulus all the way down to the left one
  std::vector<double> a{1.0}, b{4.0};
  CHECK(detour_metric(a, b) == 0.0);
  CHECK(optimal_shift(a, b) == Approx(-std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("asymptotic distance on pairs") {
  auto pair = fixtures::matched_pair({1.0, 2.0}, {2.0, 2.0}, 0.0);
  auto res = asymptotic_distance(pair);
  REQUIRE_FALSE(res.is_divergent());
  CHECK(res.value() == Approx(kHalfLog2).epsilon(1e-15));
  CHECK(res.modulus_term() == Approx(kHalfLog2).epsilon(1e-15));
  CHECK(res.end_term() == 0.0);

  // end term dominates when larger
  pair.end_distance = 0.6;
  CHECK(asymptotic_distance(pair).value() == 0.6);

  CHECK(lower_bound(pair) == asymptotic_distance(pair).value());
}

TEST_CASE("end distance requirements") {
  auto pair = fixtures::matched_pair({1.0}, {2.0}, 0.0);
  pair.end_distance.reset();
  CHECK_THROWS_AS(asymptotic_distance(pair), std::invalid_argument);
  pair.end_distance = -0.1;
  CHECK_THROWS_AS(asymptotic_distance(pair), std::domain_error);
}

TEST_CASE("divergent outcomes") {
  auto outcome = check_similar(fixtures::necklace({1.0}),
                               fixtures::necklace({1.0, 1.0}));
  auto res = asymptotic_distance(outcome);
  CHECK(res.is_divergent());
  CHECK_THROWS_AS(res.value(), std::logic_error);
  CHECK_THROWS_AS(res.modulus_term(), std::logic_error);
}

TEST_CASE("input validation on raw vectors") {
  CHECK_THROWS_AS(modulus_ratio_term({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(modulus_ratio_term({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(modulus_ratio_term({0.0}, {1.0}), std::domain_error);
  CHECK_THROWS_AS(detour_metric({1.0}, {-2.0}), std::domain_error);
}

TEST_CASE("shifted distance hits the detour optimum") {
  auto pair = fixtures::matched_pair({1.0, 2.0}, {2.0, 2.0}, 0.0);
  const double alpha = optimal_shift(pair);
  CHECK(alpha == Approx(-kQuarterLog2).epsilon(1e-15));
  auto shifted = shifted_asymptotic_distance(pair, alpha);
  CHECK(shifted.value() == Approx(kQuarterLog2).epsilon(1e-12));
  // spec example: minimum approximately 1/4 log 2 at alpha approximately -0.1733
  CHECK(shifted.value() ==
        Approx(0.5 * detour_metric(pair)).epsilon(1e-12));

  // zero shift recovers the unshifted value
  CHECK(shifted_asymptotic_distance(pair, 0.0).value() ==
        Approx(asymptotic_distance(pair).value()).epsilon(1e-15));

  // single cylinder 1 vs 4 with d_end = 0: optimum value 0
  auto single = fixtures::matched_pair({1.0}, {4.0}, 0.0);
  CHECK(shifted_asymptotic_distance(single, optimal_shift(single)).value() ==
        Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("random pairs: bounds and optimality") {
  auto gen = fixtures::rng(21);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  std::uniform_int_distribution<int> K(1, 5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = K(gen);
    std::vector<double> m(k), mp(k);
    for (int j = 0; j < k; ++j) {
      m[j] = U(gen);
      mp[j] = U(gen);
    }
    const double mod = modulus_ratio_term(m, mp);
    const double det = detour_metric(m, mp);
    CAPTURE(trial);
    // modulus term dominates half the detour, and both are non-negative
    CHECK(mod >= 0.5 * det);
    CHECK(det >= 0.0);
    CHECK(mod >= 0.0);

    // the optimal shift balances the one-sided ratios
    const double a = optimal_shift(m, mp);
    std::vector<double> shifted(mp);
    for (double& v : shifted) v *= std::exp(2.0 * a);
    CHECK(modulus_ratio_term(m, shifted) == Approx(0.5 * det).epsilon(1e-9));
  }
}
