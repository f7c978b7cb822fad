#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "catbound/errors.hpp"
#include "catbound/generator.hpp"
#include "catbound/model.hpp"
#include "support.hpp"

using catbound::build_a;
using catbound::build_a_star;
using catbound::CatastropheSpec;
using catbound::Closure;
using catbound::GeneratorVariant;
using catbound::QueueModel;
using catbound::TimeFunction;
using catbound::WeightSequence;

TEST_CASE("example entries at t = 0") {
  const auto model = QueueModel::example_paper();
  const auto a = build_a(model, 8, 0.0, Closure::defect_tracking);
  // Arrival into state 1 from empty: lambda(0) b_1 = 4 * (2/3).
  CHECK(a.entry(1, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  // Row 0 of column 1 pools service-to-empty and the catastrophe rate:
  // mu(0) + gamma_1(0) = 1 + 3.
  CHECK(a.entry(0, 1) == doctest::Approx(4.0).epsilon(1e-15));
  // gamma_2(0) = 2.5 with no service contribution.
  CHECK(a.entry(0, 2) == doctest::Approx(2.5).epsilon(1e-15));
  // q_00(0) = -lambda(0).
  CHECK(a.diagonal(0) == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("all-zero rates give the zero matrix") {
  const auto model = QueueModel::level_jump(TimeFunction::constant(0.0),
                                            TimeFunction::constant(0.0),
                                            CatastropheSpec::none(),
                                            catbound::BSequence::cubic_telescoping());
  const auto a = build_a(model, 6, 1.23, Closure::reflecting);
  for (std::size_t j = 0; j <= 6; ++j) {
    CHECK(a.diagonal(j) == 0.0);
    CHECK(a.off_diagonal_column_sum(j) == 0.0);
  }
}

TEST_CASE("reflecting columns are stochastic, defect columns track the drop") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const auto model = testsupport::random_model(rng);
    const std::size_t n = 3 + static_cast<std::size_t>(testsupport::u01(rng) * 5.0);
    const double t = 10.0 * testsupport::u01(rng);
    const auto refl = build_a(model, n, t, Closure::reflecting);
    const auto defect = build_a(model, n, t, Closure::defect_tracking);
    for (std::size_t j = 0; j <= n; ++j) {
      CHECK(std::abs(refl.column_sum(j)) < 1e-12);
      // Negated defect column sum equals the rate from j past the truncation.
      const double in_range_arrivals =
          defect.off_diagonal_column_sum(j) -
          (j >= 1 ? model.service_outflow(j, t) + model.beta_k(j, t) : 0.0);
      const double dropped = model.arrival_outflow(j, t) - in_range_arrivals;
      CHECK(std::abs(defect.column_sum(j) + dropped) < 1e-10);
      CHECK(defect.column_sum(j) < 1e-12);
      for (const auto& e : defect.column(j)) CHECK(e.value >= 0.0);
    }
  }
}

TEST_CASE("reduced matrix: zero catastrophes leave A unchanged") {
  const auto model = QueueModel::level_jump(
      TimeFunction::trig(1.0, {{1.0, 0.5, 0.0}}, 1.0), TimeFunction::constant(1.0),
      CatastropheSpec::none(), catbound::BSequence::cubic_telescoping());
  const auto a = build_a(model, 6, 0.4, Closure::defect_tracking);
  const auto [a_star, g] = build_a_star(model, 6, 0.4, Closure::defect_tracking);
  CHECK(g.beta_star == 0.0);
  for (std::size_t j = 0; j <= 6; ++j) {
    CHECK(a.diagonal(j) == a_star.diagonal(j));
    CHECK(a.off_diagonal_column_sum(j) ==
          doctest::Approx(a_star.off_diagonal_column_sum(j)).epsilon(1e-15));
  }
}

TEST_CASE("reduced example: row 0 loses beta* from every column") {
  const auto model = QueueModel::example_paper();
  const auto [a_star, g] = build_a_star(model, 8, 0.0, Closure::defect_tracking);
  CHECK(g.beta_star == doctest::Approx(2.0).epsilon(1e-15));
  for (std::size_t j = 1; j <= 8; ++j) {
    const double expected = (j == 1 ? 1.0 : 0.0) + model.beta_k(j, 0.0) - 2.0;
    CHECK(a_star.entry(0, j) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("constant-rate chain with catastrophes: reduced column sums are -c") {
  const double c = 0.8;
  const auto model = testsupport::mm1_with_catastrophes(1.5, 2.0, c, 30);
  const auto [a_star, g] = build_a_star(model, 30, 0.7, Closure::defect_tracking);
  CHECK(g.beta_star == doctest::Approx(c).epsilon(1e-15));
  for (std::size_t j = 0; j < 30; ++j) {
    CHECK(a_star.column_sum(j) == doctest::Approx(-c).epsilon(1e-13));
  }
  // The last column also loses the truncated arrival.
  CHECK(a_star.column_sum(30) == doctest::Approx(-c - 1.5).epsilon(1e-13));
}

TEST_CASE("reconstruction: A p = A* p + g on random stochastic vectors") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = testsupport::random_model(rng);
    const std::size_t n = 4 + static_cast<std::size_t>(testsupport::u01(rng) * 4.0);
    const double t = 10.0 * testsupport::u01(rng);
    const auto closure =
        testsupport::u01(rng) < 0.5 ? Closure::reflecting : Closure::defect_tracking;
    const auto a = build_a(model, n, t, closure);
    const auto [a_star, g] = build_a_star(model, n, t, closure);
    const auto p = testsupport::random_stochastic(rng, n + 1);
    std::vector<double> ap(n + 1), asp(n + 1);
    a.apply(p, ap);
    a_star.apply(p, asp);
    g.add_to(asp);
    for (std::size_t i = 0; i <= n; ++i) {
      CHECK(std::abs(ap[i] - asp[i]) < 1e-14 * (1.0 + std::abs(ap[i])));
    }
  }
}

TEST_CASE("weight conjugation") {
  const auto model = QueueModel::example_paper();
  const auto [a_star, g] = build_a_star(model, 8, 0.3, Closure::defect_tracking);
  (void)g;

  SUBCASE("identity weights change nothing") {
    const auto w = apply_weights(a_star, WeightSequence::constant_one());
    for (std::size_t j = 0; j <= 8; ++j) {
      CHECK(w.diagonal(j) == a_star.diagonal(j));
      CHECK(w.off_diagonal_column_sum(j) ==
            doctest::Approx(a_star.off_diagonal_column_sum(j)).epsilon(1e-15));
    }
  }

  SUBCASE("linear weights scale entry (2,0) by d_2/d_0 = 3") {
    const auto w = apply_weights(a_star, WeightSequence::linear());
    CHECK(w.entry(2, 0) == doctest::Approx(3.0 * a_star.entry(2, 0)).epsilon(1e-15));
    CHECK(w.variant() == GeneratorVariant::a_star_weighted);
  }

  SUBCASE("only reduced snapshots can be weighted") {
    const auto a = build_a(model, 8, 0.3, Closure::defect_tracking);
    CHECK_THROWS_AS(apply_weights(a, WeightSequence::linear()), catbound::ModelError);
  }
}

TEST_CASE("conjugation equals the dense computation D A* D^-1") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testsupport::random_model(rng);
    const std::size_t n = 3 + static_cast<std::size_t>(testsupport::u01(rng) * 5.0);
    const double t = 5.0 * testsupport::u01(rng);
    const auto [a_star, g] = build_a_star(model, n, t, Closure::defect_tracking);
    (void)g;
    const auto w = WeightSequence::linear();
    const auto weighted = apply_weights(a_star, w);
    const auto dense = a_star.dense();
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j <= n; ++j) {
        const double expect = dense[i][j] * w[i] / w[j];
        CHECK(std::abs(weighted.entry(i, j) - expect) < 1e-14 * (1.0 + std::abs(expect)));
        if (i == j) CHECK(weighted.diagonal(j) == a_star.diagonal(j));
      }
    }
  }
}

TEST_CASE("example column pattern stores O(N - j) + 2 entries per column") {
  const auto model = QueueModel::example_paper();
  const std::size_t n = 40;
  const auto a = build_a(model, n, 0.0, Closure::defect_tracking);
  for (std::size_t j = 0; j <= n; ++j) {
    CHECK(a.column(j).size() <= (n - j) + 2);
  }
}

TEST_CASE("coordinate dump is sorted by (column, row) at 17 significant digits") {
  const auto model = testsupport::mm1_with_catastrophes(1.0, 2.0, 0.5, 2);
  const auto a = build_a(model, 2, 0.0, Closure::defect_tracking);
  const std::string dump = a.coordinate_dump();
  std::istringstream is(dump);
  std::size_t prev_i = 0, prev_j = 0;
  bool first = true;
  std::size_t i = 0, j = 0;
  double v = 0.0;
  std::size_t lines = 0;
  while (is >> i >> j >> v) {
    if (!first) CHECK((j > prev_j || (j == prev_j && i > prev_i)));
    first = false;
    prev_i = i;
    prev_j = j;
    CHECK(std::abs(v - a.entry(i, j)) <= 1e-16 * std::abs(v));
    ++lines;
  }
  CHECK(lines == a.stored_entries());
}

TEST_CASE("tiny truncation of the example warns about dropped arrival mass") {
  // B_2 = 1/3 <= 0.5, but an explicit b list with most mass beyond N warns.
  const auto model = QueueModel::level_jump(
      TimeFunction::constant(1.0), TimeFunction::constant(1.0), CatastropheSpec::none(),
      catbound::BSequence::explicit_list({0.1, 0.1, 0.1, 0.7}));
  catbound::GeneratorAssembler assembler(model, 2, Closure::reflecting);
  CHECK(!assembler.warnings().empty());
}
