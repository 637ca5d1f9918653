#include "silver/error.hpp"
#include "silver/schedules.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace silver;

namespace {
const double kS2 = std::sqrt(2.0);
}

TEST_CASE("silver_schedule small levels") {
  CHECK(silver_schedule(1).entries() == std::vector<double>{kS2});
  CHECK(silver_schedule(2).entries() == std::vector<double>{kS2, 2.0, kS2});
  const std::vector<double> k3{kS2, 2.0, kS2, 2.0 + kS2, kS2, 2.0, kS2};
  const auto got = silver_schedule(3).entries();
  REQUIRE(got.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) CHECK(got[i] == doctest::Approx(k3[i]).epsilon(1e-15));
}

TEST_CASE("silver_schedule matches literal concatenation up to level 20") {
  for (int k = 1; k <= 20; ++k) {
    const auto ref = oracle::silver_concat(k);
    const auto got = silver_schedule(k).entries();
    REQUIRE(got.size() == ref.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(got[i] - ref[i]) / ref[i]);
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("silver_schedule rejects bad levels") {
  CHECK_THROWS_AS(silver_schedule(0), InvalidArgument);
  CHECK_THROWS_AS(silver_schedule(41), InvalidArgument);
}

TEST_CASE("silver_step examples") {
  CHECK(silver_step(0) == kS2);
  CHECK(silver_step(3) == doctest::Approx(2.0 + kS2).epsilon(1e-15));
  const double seventh = oracle::frozen(oracle::silver_concat(4)[7], 6.82842712474619);
  CHECK(silver_step(7) == doctest::Approx(seventh).epsilon(1e-14));
}

TEST_CASE("silver_prefix covers arbitrary lengths") {
  const auto s = silver_prefix(1500).entries();
  const auto ref = oracle::silver_concat(11);
  REQUIRE(s.size() == 1500);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-13));
  // Past the end the infinite sequence continues.
  CHECK(silver_prefix(5).entry(7) == silver_step(7));
}

TEST_CASE("applied steps divide by L") {
  const StepSchedule s = silver_prefix(5).with_smoothness(4.0);
  for (std::uint64_t i = 0; i < 5; ++i) CHECK(s.applied(i) == doctest::Approx(s.entry(i) / 4.0));
  CHECK_THROWS_AS(silver_prefix(5).with_smoothness(0.0), InvalidArgument);
}

TEST_CASE("rate_r examples") {
  const double r1 = oracle::frozen(oracle::rate(1), 0.1815846585571614);
  CHECK(rate_r(1) == doctest::Approx(r1).epsilon(1e-15));
  // r_k rho^k tends to 1/2.
  for (int k = 1; k <= 30; ++k) {
    const double scaled = rate_r(k) * std::pow(kRho, k);
    CHECK(scaled <= 0.5 + 1e-12);
    CHECK(scaled > 0.3);
  }
  CHECK(rate_r(30) * std::pow(kRho, 30) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(rate_r(0), InvalidArgument);
}

TEST_CASE("rate identity a - a^2 = 1 - rho^{2k}") {
  for (int k = 1; k <= 12; ++k) {
    const double a = 1.0 / (2.0 * rate_r(k));
    const double lhs = a - a * a, rhs = 1.0 - std::pow(kRho, 2 * k);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
  }
}

TEST_CASE("restart_plan examples") {
  const RestartPlan p10 = restart_plan(10.0, 1);
  CHECK(p10.k_star == 4);
  CHECK(p10.inner_iters == 15);
  const RestartPlan p1000 = restart_plan(1000.0, 2);
  CHECK(p1000.k_star == 9);
  CHECK(p1000.inner_iters == 511);
  CHECK(p1000.total() == 1022);
  for (double kappa : {1.5, 10.0, 1e3, 1e7, 1e13}) CHECK(2.0 * kappa * rate_r(restart_plan(kappa, 1).k_star) < 1.0);
  CHECK_THROWS_AS(restart_plan(1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(restart_plan(10.0, 0), InvalidArgument);
}

TEST_CASE("split_budget picks the divisor nearest 2^k* - 1") {
  // kappa = 10: k* = 4, target 15; 1023 = 3 * 11 * 31 has divisors 11 and 31,
  // nearest to 15 is 11.
  const BudgetSplit s = split_budget(10.0, 1023);
  CHECK(s.k_star == 4);
  CHECK(s.block == 11);
  CHECK(s.cycles == 93);
  const BudgetSplit exact = split_budget(10.0, 150);
  CHECK(exact.block == 15);
  CHECK(exact.cycles == 10);
}

TEST_CASE("constant_schedule examples") {
  CHECK(constant_schedule(1.0, 3).entries() == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(constant_schedule(1.99, 2).entries() == std::vector<double>{1.99, 1.99});
  CHECK(constant_schedule(2.01, 1).entries() == std::vector<double>{2.01});
  CHECK_THROWS_AS(constant_schedule(0.0, 3), InvalidArgument);
  CHECK_THROWS_AS(constant_schedule(1.0, 0), InvalidArgument);
}

TEST_CASE("restarted_schedule resets the index every block") {
  const StepSchedule s = restarted_schedule(7, 3);
  CHECK(s.size() == 21);
  CHECK(s.block_length() == 7);
  for (std::uint64_t i = 0; i < 21; ++i) CHECK(s.entry(i) == silver_step(i % 7));
}
