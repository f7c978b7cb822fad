#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "catbound/errors.hpp"
#include "catbound/model.hpp"
#include "catbound/weights.hpp"
#include "support.hpp"

using catbound::BSequence;
using catbound::CatastropheSpec;
using catbound::ModelError;
using catbound::QueueModel;
using catbound::TimeFunction;
using catbound::WeightSequence;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("partial tails of the cubic family") {
  const auto model = QueueModel::example_paper();
  CHECK(b_partial_tail(model, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b_partial_tail(model, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(b_partial_tail(model, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("cubic closed form agrees with partial sums up to k = 1000") {
  // Oracle: B_k = sum of b_i computed termwise with compensated summation,
  // independent of the closed form 2/(k(k+1)).
  const auto model = QueueModel::example_paper();
  const std::size_t kmax = 1000;
  for (std::size_t k = 1; k <= kmax; k += 37) {
    testsupport::KahanSum sum;
    for (std::size_t i = k; i <= 4000000; ++i) {
      const double id = static_cast<double>(i);
      sum.add(4.0 / (id * (id + 1.0) * (id + 2.0)));
    }
    // Residual beyond the oracle horizon is below 4 / (2 * 4e6^2) ~ 1e-13.
    CHECK(std::abs(b_partial_tail(model, k) - sum.value()) < 1e-12);
  }
}

TEST_CASE("partial tail errors") {
  const auto general = QueueModel::general({}, {}, CatastropheSpec::none());
  CHECK_THROWS_AS(b_partial_tail(general, 1), ModelError);
  CHECK_THROWS_AS(b_partial_tail(QueueModel::example_paper(), 0), ModelError);
}

TEST_CASE("beta_star of the example tail rule") {
  const auto model = QueueModel::example_paper();
  // gamma_k(0) = 2 + 1/k decreases to the limit 2; the infimum is not
  // attained at any finite k. Oracle: scan k up to 1e6.
  double scan = kInf;
  for (std::size_t k = 1; k <= 1000000; k *= 2) {
    scan = std::min(scan, model.beta_k(k, 0.0));
  }
  const double inf = beta_star(model, 0.0);
  CHECK(inf == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(inf <= scan);
  CHECK(scan - inf < 2e-6);  // scan approaches the limit from above
  // At t = 0.75 the coefficient hits zero and the infimum is attained.
  CHECK(beta_star(model, 0.75) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("beta_star trivial cases") {
  const auto uniform = QueueModel::general(
      {}, {}, CatastropheSpec::uniform(TimeFunction::constant(0.7)));
  CHECK(beta_star(uniform, 3.0) == doctest::Approx(0.7));
  const auto none = QueueModel::general({}, {}, CatastropheSpec::none());
  CHECK(beta_star(none, 1.0) == 0.0);
}

TEST_CASE("beta_star is a lower bound for every represented state") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testsupport::random_model(rng);
    for (int i = 0; i < 16; ++i) {
      const double t = 10.0 * testsupport::u01(rng);
      const double inf = beta_star(model, t);
      for (std::size_t k = 1; k <= 64; ++k) {
        CHECK(inf <= model.beta_k(k, t) + 1e-12);
      }
    }
  }
}

TEST_CASE("weight constants of the named families") {
  const auto linear = weight_constants(WeightSequence::linear(), 100);
  CHECK(linear.d == 1.0);
  CHECK(linear.d_star == kInf);
  CHECK(linear.w == 1.0);

  const auto one = weight_constants(WeightSequence::constant_one(), 100);
  CHECK(one.d == 1.0);
  CHECK(one.d_star == 1.0);
  CHECK(one.w == 0.0);

  const auto geo = weight_constants(WeightSequence::geometric(2.0), 100);
  CHECK(geo.d == 1.0);
  CHECK(geo.d_star == kInf);
  CHECK(geo.w == 2.0);
}

TEST_CASE("named-family constants against brute-force scans") {
  // Quantities attained in the scan range must match to 1e-12; infima
  // attained only in the limit must bracket the declared value.
  const auto w = WeightSequence::linear();
  double scan_d = kInf, scan_w = kInf;
  for (std::size_t k = 0; k <= 100000; ++k) {
    scan_d = std::min(scan_d, w[k]);
    if (k >= 1) scan_w = std::min(scan_w, w[k] / static_cast<double>(k));
  }
  CHECK(std::abs(scan_d - w.constants().d) < 1e-12);          // attained at k = 0
  CHECK(w.constants().w <= scan_w);                            // limit case
  CHECK(scan_w - w.constants().w < 1e-4);

  const auto geo = WeightSequence::geometric(2.0);
  double scan_geo_w = kInf;
  for (std::size_t k = 1; k <= 100; ++k) {
    scan_geo_w = std::min(scan_geo_w, geo[k] / static_cast<double>(k));
  }
  CHECK(std::abs(scan_geo_w - geo.constants().w) < 1e-12);
}

TEST_CASE("explicit weights with tail rules") {
  const auto flat = WeightSequence::explicit_tail({2.0, 0.5, 3.0}, {});
  CHECK(flat.constants().d == 0.5);
  CHECK(flat.constants().d_star == 3.0);
  CHECK(flat.constants().w == 0.0);  // constant tail: d_k / k -> 0
  CHECK(flat[10] == 3.0);

  const auto growing = WeightSequence::explicit_tail(
      {1.0, 2.0}, {catbound::WeightTailKind::linear, 0.5});
  CHECK(growing[2] == doctest::Approx(2.5));
  CHECK(growing.constants().d == 1.0);
  CHECK(growing.constants().d_star == kInf);
  CHECK(growing.constants().w == 0.5);  // limit of (2 + (k-1)/2)/k

  CHECK_THROWS_AS(WeightSequence::explicit_tail({1.0, 0.0}, {}), ModelError);
  CHECK_THROWS_AS(WeightSequence::geometric(0.9), ModelError);
}

TEST_CASE("total outflow and L_N are finite and consistent") {
  const auto model = QueueModel::example_paper();
  // |q_00(t)| = lambda(t) B_1 = lambda(t).
  CHECK(model.total_outflow(0, 0.0) == doctest::Approx(4.0).epsilon(1e-14));
  // |q_11(0)| = lambda(0) B_2 + mu(0) + gamma_1(0) = 4/3 + 1 + 3.
  CHECK(model.total_outflow(1, 0.0) == doctest::Approx(4.0 / 3.0 + 4.0).epsilon(1e-14));
  CHECK(l_n(model, 50, 0.0) >= model.total_outflow(7, 0.0));
}

TEST_CASE("the two example variants differ only in the arrival scale") {
  const auto paper = QueueModel::example_paper();
  const auto corrected = QueueModel::example_corrected();
  for (double t : {0.0, 0.3, 0.77}) {
    CHECK(paper.lambda()(t) == doctest::Approx(4.0 * corrected.lambda()(t)).epsilon(1e-14));
    CHECK(paper.mu()(t) == corrected.mu()(t));
    CHECK(beta_star(paper, t) == beta_star(corrected, t));
  }
}
