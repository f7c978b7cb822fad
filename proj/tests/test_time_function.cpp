#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "catbound/errors.hpp"
#include "catbound/time_function.hpp"

using catbound::ModelError;
using catbound::TimeFunction;

TEST_CASE("trig evaluation matches the example arrival rate") {
  const auto lambda = TimeFunction::trig(2.0, {{1.0, 2.0, 0.0}}, 1.0);
  CHECK(lambda(0.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(lambda(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(catbound::eval_rate(lambda, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant zero stays zero") {
  const auto zero = TimeFunction::constant(0.0);
  CHECK(zero(0.0) == 0.0);
  CHECK(zero(123.456) == 0.0);
  CHECK(zero.is_constant_zero());
}

TEST_CASE("declared period is checked against the samples") {
  // f(t + T) = f(t) on a grid: 1-periodic harmonics accept period 1,
  // frequency 1.5 does not complete whole cycles in period 1.
  CHECK_NOTHROW(TimeFunction::trig(1.0, {{2.0, 0.5, 0.0}}, 1.0));
  CHECK_THROWS_AS(TimeFunction::trig(1.0, {{1.5, 0.5, 0.0}}, 1.0), ModelError);
}

TEST_CASE("negative rates are hard errors") {
  CHECK_THROWS_AS(TimeFunction::constant(-0.5), ModelError);
  // offset 1 with amplitude 2 dips to -1: rejected at construction.
  CHECK_THROWS_AS(TimeFunction::trig(1.0, {{1.0, 2.0, 0.0}}, 1.0), ModelError);
  CHECK_THROWS_AS(TimeFunction::piecewise({0.0, 1.0}, {1.0, -2.0}), ModelError);
}

TEST_CASE("periodic evaluation wraps") {
  const auto f = TimeFunction::piecewise({0.0, 0.5}, {1.0, 3.0}, 1.0);
  CHECK(f(0.25) == 1.0);
  CHECK(f(0.75) == 3.0);
  CHECK(f(2.25) == 1.0);
  CHECK(f(7.75) == 3.0);

  const auto g = TimeFunction::tabulated({0.0, 1.0}, {0.0, 2.0}, 1.0);
  CHECK(g(0.5) == doctest::Approx(1.0));
  CHECK(g(1.5) == doctest::Approx(1.0));
}

TEST_CASE("exact integration per kind") {
  const auto c = TimeFunction::constant(1.5);
  CHECK(c.integrate(1.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));

  const auto lambda = TimeFunction::trig(2.0, {{1.0, 2.0, 0.0}}, 1.0);
  // One full period of the cosine integrates away.
  CHECK(lambda.integrate(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lambda.integrate(0.0, 0.25) ==
        doctest::Approx(0.5 + 1.0 / std::numbers::pi).epsilon(1e-14));

  const auto pw = TimeFunction::piecewise({0.0, 0.5}, {1.0, 3.0}, 1.0);
  CHECK(pw.integrate(0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pw.integrate(0.25, 2.25) == doctest::Approx(4.0).epsilon(1e-14));

  const auto tab = TimeFunction::tabulated({0.0, 1.0}, {0.0, 2.0});
  CHECK(tab.integrate(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tab.integrate(0.0, 2.0) == doctest::Approx(3.0).epsilon(1e-14));  // flat beyond
}

TEST_CASE("rigorous upper bounds") {
  CHECK(TimeFunction::trig(2.0, {{1.0, 2.0, 0.0}}, 1.0).upper_bound() ==
        doctest::Approx(4.0).epsilon(1e-15));
  CHECK(TimeFunction::trig(2.0, {{1.0, 1.0, 1.0}}, 1.0).upper_bound() ==
        doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(TimeFunction::piecewise({0.0, 0.5}, {1.0, 3.0}, 1.0).upper_bound() == 3.0);
}

TEST_CASE("periodicity holds on a sample grid") {
  const auto f = TimeFunction::trig(2.0, {{1.0, 2.0, 0.0}}, 1.0);
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.01 * i;
    CHECK(std::abs(f(t + 1.0) - f(t)) < 1e-12);
  }
}
