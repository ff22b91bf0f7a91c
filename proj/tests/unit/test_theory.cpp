#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "emg/theory.hpp"

using namespace emg::theory;

TEST_SUITE("theory") {

TEST_CASE("tau") {
  CHECK(tau(0.0, 101) == 0.5);
  CHECK(tau(1.0, 101) == 0.5);
  CHECK(tau(0.5, 101) == doctest::Approx(0.47512).epsilon(1e-5));
  CHECK(tau(0.5, 101) == 0.5 - 0.25 / std::sqrt(101.0));
}

TEST_CASE("emg_density") {
  CHECK(emg_density(0.5, 101) == doctest::Approx(4.0 * std::sqrt(101.0)).epsilon(1e-15));
  CHECK(emg_density(0.5, 101) == doctest::Approx(40.20).epsilon(1e-4));
  CHECK(emg_density(0.1, 101) / emg_density(0.5, 101) == doctest::Approx(25.0 / 9.0).epsilon(1e-14));
  CHECK(emg_density(0.1, 7) / emg_density(0.5, 7) == doctest::Approx(25.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(emg_density(0.0, 101), std::domain_error);
  CHECK_THROWS_AS(emg_density(1.0, 101), std::domain_error);

  // convex and U-shaped: second differences positive, minimum at 1/2
  for (int k = 2; k < 98; ++k) {
    const double g = k / 100.0;
    const double h = 0.01;
    CHECK(emg_density(g - h, 101) - 2 * emg_density(g, 101) + emg_density(g + h, 101) > 0.0);
    CHECK(emg_density(g, 101) >= emg_density(0.5, 101));
  }
}

TEST_CASE("emg_density is symmetric under g -> 1 - g") {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double g = unit(gen);
    CHECK(emg_density(g, 101) == doctest::Approx(emg_density(1.0 - g, 101)).epsilon(1e-12));
  }
}

TEST_CASE("density normalizer matches the closed-form integral") {
  // integral of sqrt(N) / (g(1-g)) over [d, 1-d] = 2 sqrt(N) ln((1-d)/d)
  for (int n : {1, 101, 1001}) {
    const double d = 1e-3;
    const double exact = 2.0 * std::sqrt(static_cast<double>(n)) * std::log((1.0 - d) / d);
    CHECK(emg_density_normalizer(n, d) == doctest::Approx(exact).epsilon(1e-8));
  }
  CHECK_THROWS_AS(emg_density_normalizer(101, 0.0), std::domain_error);
}

TEST_CASE("majority_roundtrip_profit") {
  CHECK(majority_roundtrip_profit(101, 0.5) == 0.0);
  CHECK(majority_roundtrip_profit(101, 0.2) == doctest::Approx(6.030).epsilon(1e-4));
  CHECK(majority_roundtrip_profit(101, 0.8) == doctest::Approx(-6.030).epsilon(1e-4));
  for (int k = 0; k <= 100; ++k) {
    const double beta = k / 100.0;
    const double p = majority_roundtrip_profit(101, beta);
    if (beta < 0.5) CHECK(p > 0.0);
    if (beta > 0.5) CHECK(p < 0.0);
  }
  CHECK_THROWS_AS(majority_roundtrip_profit(101, 1.2), std::domain_error);
}

TEST_CASE("critical strategies") {
  TheoryParams p;
  p.R = 1.0;
  p.aN = 0.0;
  CHECK(critical_strategy_high(p) == 0.5);
  CHECK(critical_strategy_low(p) == 0.5);
  p.R = 3.0;
  CHECK(critical_strategy_high(p) == 0.75);
  CHECK(critical_strategy_low(p) == 0.25);

  // the two edges always sum to one
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> r_dist(1.0, 11.0);
  std::uniform_real_distribution<double> a_dist(-0.3, 0.3);
  for (int i = 0; i < 1000; ++i) {
    p.R = r_dist(gen);
    p.aN = a_dist(gen);
    p.D = -4.0;
    CHECK(critical_strategy_high(p) + critical_strategy_low(p) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("critical strategies move apart as R grows") {
  for (double aN : {0.0, 0.05, -0.1}) {
    TheoryParams p;
    p.aN = aN;
    p.D = -4.0;
    const double x = aN * p.D;
    REQUIRE(x < 1.0);
    double prev_high = -1.0;
    double prev_low = 2.0;
    for (int k = 0; k <= 100; ++k) {
      p.R = 1.0 + k * 0.1;
      const double hi = critical_strategy_high(p);
      const double lo = critical_strategy_low(p);
      CHECK(hi > prev_high);
      CHECK(lo < prev_low);
      // symbolic derivatives: d/dR high = (1 - x)/(1+R)^2, d/dR low = -(1 - x)/(1+R)^2
      const double h = 1e-6;
      TheoryParams q = p;
      q.R += h;
      const double slope = (1.0 - x) / ((1.0 + p.R) * (1.0 + p.R));
      CHECK((critical_strategy_high(q) - hi) / h == doctest::Approx(slope).epsilon(1e-4));
      CHECK((critical_strategy_low(q) - lo) / h == doctest::Approx(-slope).epsilon(1e-4));
      prev_high = hi;
      prev_low = lo;
    }
  }
}

TEST_CASE("TheoryParams validation") {
  TheoryParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 2.0;
  CHECK_THROWS(p.validate());
}

}  // TEST_SUITE
