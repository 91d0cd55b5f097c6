#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mechproof/cost.hpp"
#include "mechproof/revenue.hpp"

using namespace mechproof;

TEST_CASE("cost families evaluate at integer points") {
  auto exp2 = CostModel<double>::exp2_minus_one();
  CHECK(exp2.value_at(0) == 0.0);
  CHECK(exp2.value_at(4) == 15.0);
  CHECK(exp2.value_at(8) == 255.0);

  auto square = CostModel<double>::power(2);
  CHECK(square.value_at(5) == 25.0);
  auto cube = CostModel<double>::power(3);
  CHECK(cube.value_at(3) == 27.0);

  auto exact = CostModel<Rational>::exp2_minus_one();
  CHECK(exact.value_at(10) == Rational(1023));
}

TEST_CASE("cost construction rejects invalid families") {
  CHECK_THROWS_AS(CostModel<double>::power(0), std::invalid_argument);
  CHECK_THROWS_AS(CostModel<double>::table({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(CostModel<double>::table({0.0, 2.0, 1.0}), std::invalid_argument);
  // increments must not shrink: 0,3,4 has increments 3 then 1
  CHECK_THROWS_AS(CostModel<double>::table({0.0, 3.0, 4.0}), std::invalid_argument);
  CHECK_NOTHROW(CostModel<double>::table({0.0, 1.0, 3.0, 7.0}));
}

TEST_CASE("cost domain errors") {
  auto exp2 = CostModel<double>::exp2_minus_one();
  CHECK_THROWS_AS(exp2.value(-1.0), std::domain_error);
  auto tab = CostModel<double>::table({0.0, 1.0, 3.0});
  CHECK_THROWS_AS(tab.value(2.5), std::domain_error);
  auto exact = CostModel<Rational>::exp2_minus_one();
  CHECK_THROWS_AS(exact.value(Rational(3, 2)), std::domain_error);
  CHECK_NOTHROW(exact.compare_value(Rational(3, 2), Rational(2)));
}

TEST_CASE("table interpolation is piecewise linear") {
  auto tab = CostModel<double>::table({0.0, 1.0, 3.0, 7.0});
  CHECK(tab.value(1.5) == Catch::Approx(2.0));
  CHECK(tab.value(2.25) == Catch::Approx(4.0));
  auto exact = CostModel<Rational>::table({Rational(0), Rational(1), Rational(3)});
  CHECK(exact.value(Rational(3, 2)) == Rational(2));
}

TEST_CASE("exact comparison decides irrational cost values") {
  auto exact = CostModel<Rational>::exp2_minus_one();
  // f(3/2) = 2^1.5 - 1 = 1.82842712...
  CHECK(exact.compare_value(Rational(3, 2), Rational(18284, 10000)) == 1);
  CHECK(exact.compare_value(Rational(3, 2), Rational(18285, 10000)) == -1);
  CHECK(exact.compare_value(Rational(2), Rational(3)) == 0);
  CHECK(exact.compare_value(Rational(9, 2), Rational(21)) ==
        (std::exp2(4.5) - 1 > 21 ? 1 : -1));
  // negative thresholds are below any cost value
  CHECK(exact.compare_value(Rational(1, 2), Rational(-5)) == 1);

  auto dbl = CostModel<double>::exp2_minus_one();
  CHECK(dbl.compare_value(1.5, 1.8) == 1);
  CHECK(dbl.compare_value(1.5, 1.9) == -1);
  CHECK(dbl.compare_value(2.0, 3.0) == 0);
}

TEST_CASE("cost families are midpoint-convex on sampled pairs") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<long> pick(0, 12);
  auto exp2 = CostModel<Rational>::exp2_minus_one();
  auto cube = CostModel<Rational>::power(3);
  auto linear = CostModel<Rational>::power(1);
  auto tab = CostModel<double>::table({0.0, 0.5, 2.0, 4.5, 8.0, 12.5, 18.0, 24.5, 32.0,
                                       40.5, 50.0, 60.5, 72.0});
  for (int trial = 0; trial < 60; ++trial) {
    const long a = pick(rng), b = pick(rng);
    const Rational mid = Rational(a + b) / 2;
    // f(a) + f(b) >= 2 f((a+b)/2)  <=>  f(mid) <= (f(a)+f(b))/2
    CHECK(exp2.compare_value(mid, (exp2.value_at(a) + exp2.value_at(b)) / 2) <= 0);
    CHECK(cube.compare_value(mid, (cube.value_at(a) + cube.value_at(b)) / 2) <= 0);
    CHECK(linear.compare_value(mid, (linear.value_at(a) + linear.value_at(b)) / 2) <= 0);
    CHECK(tab.value((a + b) / 2.0) <=
          (tab.value_at(a) + tab.value_at(b)) / 2 + kEpsilon);
  }
}

TEST_CASE("quadratic quality-weighted revenue") {
  QualityProfile<double> two{2, 0.5, 21.0, 1.0};
  auto rev = RevenueModel<double>::quadratic_quality_weighted();
  CHECK(rev.value(two, 1, 3) == Catch::Approx(2 * 21.0 * 9));
  CHECK(rev.value(two, 2, 3) == Catch::Approx((21.0 + 1.0) * 9));
  CHECK(rev.value(two, 3, 3) == Catch::Approx(2 * 1.0 * 9));

  QualityProfile<double> three{3, 0.5, 80.0, 20.0};
  CHECK(rev.value(three, 1, 2) == Catch::Approx(3 * 80.0 * 4));
  CHECK(rev.value(three, 2, 2) == Catch::Approx((2 * 80.0 + 20.0) * 4));
  CHECK(rev.value(three, 3, 2) == Catch::Approx((80.0 + 2 * 20.0) * 4));
  CHECK(rev.value(three, 4, 2) == Catch::Approx(3 * 20.0 * 4));
  CHECK_THROWS_AS(rev.value(three, 5, 2), std::out_of_range);
}

TEST_CASE("custom revenue polynomials") {
  QualityProfile<double> prof{2, 0.5, 2.0, 1.0};
  auto rev = RevenueModel<double>::custom({{1.0, 0.0, 2.0}, {0.0, 3.0}, {5.0}});
  CHECK(rev.value(prof, 1, 3) == Catch::Approx(1.0 + 2.0 * 9));
  CHECK(rev.value(prof, 2, 4) == Catch::Approx(12.0));
  CHECK(rev.value(prof, 3, 7) == Catch::Approx(5.0));
  CHECK_THROWS_AS(RevenueModel<double>::custom({{-1.0}}), std::invalid_argument);
  auto short_rev = RevenueModel<double>::custom({{1.0}, {1.0}});
  CHECK_THROWS_AS(short_rev.validate_for(prof), std::invalid_argument);
}
