#include <doctest.h>

#include <cmath>

#include "bathcool/analytic.hpp"

using namespace bathcool;

namespace {
constexpr LawKind kAll[] = {LawKind::Newton, LawKind::Markov, LawKind::Modified};
}

TEST_CASE("closed-form values") {
  const CoolingParams<double> fig(2000, 200, 1);
  for (LawKind k : kAll) CHECK(evaluate_law(k, fig, 0.0) == 2000);
  CHECK(evaluate_law(LawKind::Newton, fig, std::log(3.0)) == doctest::Approx(800).epsilon(1e-14));
  CHECK(evaluate_law(LawKind::Newton, fig, 0.5) == doctest::Approx(1291.75518748274).epsilon(1e-13));
  CHECK(evaluate_law(LawKind::Modified, fig, 0.5) == doctest::Approx(1163.47057133418).epsilon(1e-13));

  const CoolingParams<double> unit(1, 0, 1);
  CHECK(evaluate_law(LawKind::Modified, unit, 1.0) == doctest::Approx(0.22313016014843).epsilon(1e-13));
  CHECK(evaluate_law(LawKind::Markov, unit, 1.0) == doctest::Approx(0.367879441171442).epsilon(1e-13));
  CHECK_THROWS_AS(evaluate_law(LawKind::Newton, unit, -0.1), DomainError);
}

TEST_CASE("rate right-hand side") {
  for (LawKind k : kAll) CHECK(rate_rhs(k, CoolingParams<double>(5, 3, 2), 3.0, 0.7) == 0);
  CHECK(rate_rhs(LawKind::Modified, CoolingParams<double>(2000, 200, 1), 2000.0, 0.0) == -1800);
  CHECK(rate_rhs(LawKind::Modified, CoolingParams<double>(0, 200, 1), 300.0, 0.5) == -150);
}

TEST_CASE("central difference of the law matches the rate") {
  for (const auto& p : {CoolingParams<double>(2000, 200, 1), CoolingParams<double>(3, 10, 0.4),
                        CoolingParams<double>(8, 2, 2.5)}) {
    const double h = 1e-6 / p.gamma;
    const double tol = 1e-6 * p.gamma * std::abs(p.x0 - p.xR);
    for (LawKind k : kAll) {
      for (double s = 0.01; s <= 5; s += 0.07) {
        const double t = s / p.gamma;
        const double numeric = (evaluate_law(k, p, t + h) - evaluate_law(k, p, t - h)) / (2 * h);
        CHECK(std::abs(numeric - rate_rhs(k, p, evaluate_law(k, p, t), t)) < tol);
      }
    }
  }
}

TEST_CASE("modified cools faster than Newton, heats faster too") {
  const CoolingParams<double> fig(2000, 200, 1);
  for (double t = 0.01; t <= 3; t += 0.01)
    CHECK(evaluate_law(LawKind::Modified, fig, t) < evaluate_law(LawKind::Newton, fig, t));
  const CoolingParams<double> heat(1, 4, 1);
  CHECK(evaluate_law(LawKind::Modified, heat, 0.5) > evaluate_law(LawKind::Newton, heat, 0.5));
}

TEST_CASE("modified and Markov agree to first order near t = 0") {
  const CoolingParams<double> p(10, 1, 1.3);
  for (double t = 0.01; t < 3; t += 0.05) {
    const double gt = p.gamma * t;
    const double diff = std::abs(evaluate_law(LawKind::Modified, p, t) - evaluate_law(LawKind::Markov, p, t));
    CHECK(diff / 9 < gt * gt * std::exp(-gt));
  }
}

TEST_CASE("half-thermalization time") {
  CHECK(half_thermalization_time(LawKind::Newton, 1.0) == doctest::Approx(0.693147180559945).epsilon(1e-14));
  CHECK(half_thermalization_time(LawKind::Modified, 1.0) == doctest::Approx(0.544763529191407).epsilon(1e-14));
  CHECK(half_thermalization_time(LawKind::Newton, 2.0) == doctest::Approx(0.346573590279973).epsilon(1e-14));
  CHECK(half_thermalization_time(LawKind::Modified, 0.5) == doctest::Approx(1.08952705838281).epsilon(1e-14));
  CHECK_THROWS_AS(half_thermalization_time(LawKind::Newton, 0.0), DomainError);

  for (LawKind k : kAll) {
    const double ref = half_thermalization_time(k, 1.7);
    for (const auto& [x0, xR] : {std::pair{2000.0, 200.0}, std::pair{5.0, 1.0}, std::pair{-3.0, 40.0}}) {
      const CoolingParams<double> p(x0, xR, 1.7);
      CHECK(time_to_value(k, p, (x0 + xR) / 2) == doctest::Approx(ref).epsilon(1e-14));
      CHECK(evaluate_law(k, p, ref) == doctest::Approx((x0 + xR) / 2).epsilon(1e-13));
    }
  }
}

TEST_CASE("time to target") {
  const CoolingParams<double> fig(2000, 200, 1);
  const double newton = time_to_value(LawKind::Newton, fig, 800.0);
  const double modified = time_to_value(LawKind::Modified, fig, 800.0);
  CHECK(newton == doctest::Approx(1.09861228866811).epsilon(1e-14));
  CHECK(modified == doctest::Approx(0.788078459502328).epsilon(1e-14));
  CHECK(modified / newton == doctest::Approx(0.717339927498669).epsilon(1e-13));

  CHECK_THROWS_AS(time_to_value(LawKind::Newton, fig, 100.0), DomainError);
  CHECK_THROWS_AS(time_to_value(LawKind::Newton, fig, 200.0), DomainError);
  CHECK_THROWS_AS(time_to_value(LawKind::Newton, fig, 2000.0), DomainError);
  CHECK_THROWS_AS(time_to_value(LawKind::Modified, fig, 2500.0), DomainError);
}

TEST_CASE("inversion round trip, including targets next to the endpoints") {
  for (const auto& p : {CoolingParams<double>(2000, 200, 1), CoolingParams<double>(1, 9, 0.3)}) {
    for (LawKind k : kAll) {
      for (double frac : {1e-9, 1e-4, 0.1, 0.5, 0.9, 0.999999}) {
        const double target = p.xR + frac * (p.x0 - p.xR);
        const double t = time_to_value(k, p, target);
        CHECK(std::abs(evaluate_law(k, p, t) - target) / std::abs(target - p.xR) < 1e-10 + 1e-15 / frac);
      }
    }
  }
}

TEST_CASE("names") {
  CHECK(to_string(LawKind::Modified) == "modified");
  CHECK_THROWS_AS(CoolingParams<double>(1, 0, 0), DomainError);
  CHECK_THROWS_AS(CoolingParams<double>(NAN, 0, 1), DomainError);
}
