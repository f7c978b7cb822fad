#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catbound/bounds.hpp"
#include "catbound/errors.hpp"
#include "catbound/model.hpp"
#include "catbound/solver.hpp"
#include "support.hpp"

using catbound::BoundOptions;
using catbound::BSequence;
using catbound::CatastropheSpec;
using catbound::QueueModel;
using catbound::TimeFunction;
using catbound::uniform_grid;
using catbound::WeightSequence;

TEST_CASE("zero generator leaves the state untouched") {
  const auto model = QueueModel::level_jump(TimeFunction::constant(0.0),
                                            TimeFunction::constant(0.0),
                                            CatastropheSpec::none(),
                                            BSequence::cubic_telescoping());
  const auto grid = uniform_grid(5.0, 11);
  const auto p0 = testsupport::delta_vector(9, 3);
  const auto traj = catbound::solve_forward(model, 8, p0, grid, 1e-10);
  for (const auto& p : traj.probabilities) {
    for (std::size_t k = 0; k <= 8; ++k) CHECK(p[k] == doctest::Approx(p0[k]).epsilon(1e-14));
  }
}

TEST_CASE("two-state chain matches the closed form") {
  const double a = 0.8, b = 1.7;
  std::vector<catbound::RateEntry> arrivals{{0, 1, TimeFunction::constant(a)}};
  std::vector<catbound::RateEntry> services{{1, 1, TimeFunction::constant(b)}};
  const auto model =
      QueueModel::general(std::move(arrivals), std::move(services), CatastropheSpec::none());
  const auto grid = uniform_grid(3.0, 31);
  const auto traj =
      catbound::solve_forward(model, 1, testsupport::delta_vector(2, 0), grid, 1e-12);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(traj.probabilities[i][1] - testsupport::two_state_p1(a, b, grid[i])) <
          1e-10);
  }
}

TEST_CASE("constant-rate models against the dense matrix exponential") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t n = 20 + 10 * static_cast<std::size_t>(trial);
    const auto model = testsupport::mm1_with_catastrophes(
        1.0 + testsupport::u01(rng), 1.5 + testsupport::u01(rng),
        0.5 * testsupport::u01(rng), n);
    const auto a = catbound::build_a(model, n, 0.0, catbound::Closure::reflecting);
    const auto p0 = testsupport::random_stochastic(rng, n + 1);
    const auto reference = testsupport::expm_reference(a.dense(), p0, 1.0);
    const auto grid = uniform_grid(1.0, 5);
    const auto traj = catbound::solve_forward(model, n, p0, grid, 1e-12);
    double err = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      err = std::max(err, std::abs(traj.probabilities.back()[k] - reference[k]));
    }
    CHECK(err < 1e-8);
  }
}

TEST_CASE("conservation on the example model") {
  const auto model = QueueModel::example_paper();
  const auto grid = uniform_grid(4.0, 41);
  const auto traj =
      catbound::solve_forward(model, 120, testsupport::delta_vector(121, 0), grid, 1e-10);
  for (double defect : traj.tail_defect) CHECK(std::abs(defect) <= 1e-9);
  for (const auto& p : traj.probabilities) {
    for (double v : p) CHECK(v >= -1e-12);
  }
}

TEST_CASE("reduced system equals the full system") {
  SUBCASE("zero catastrophes: trajectories are identical") {
    const auto model = QueueModel::level_jump(
        TimeFunction::trig(1.0, {{1.0, 0.5, 0.0}}, 1.0), TimeFunction::constant(1.0),
        CatastropheSpec::none(), BSequence::cubic_telescoping());
    const auto grid = uniform_grid(3.0, 16);
    const auto p0 = testsupport::delta_vector(41, 0);
    const auto full = catbound::solve_forward(model, 40, p0, grid, 1e-11);
    const auto reduced = catbound::solve_reduced(model, 40, p0, grid, 1e-11);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t k = 0; k <= 40; ++k) {
        CHECK(std::abs(full.probabilities[i][k] - reduced.probabilities[i][k]) < 1e-9);
      }
    }
  }

  SUBCASE("example model: l1 gap below 10x tolerance") {
    const auto model = QueueModel::example_paper();
    const double tol = 1e-10;
    const auto grid = uniform_grid(3.0, 31);
    const auto p0 = testsupport::delta_vector(101, 0);
    const auto full = catbound::solve_forward(model, 100, p0, grid, tol);
    const auto reduced = catbound::solve_reduced(model, 100, p0, grid, tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double l1 = 0.0;
      for (std::size_t k = 0; k <= 100; ++k) {
        l1 += std::abs(full.probabilities[i][k] - reduced.probabilities[i][k]);
      }
      worst = std::max(worst, l1);
    }
    CHECK(worst <= 10.0 * tol * 10.0);  // comfortably below 1e-8
  }
}

TEST_CASE("invalid initial vectors are rejected") {
  const auto model = QueueModel::example_paper();
  const auto grid = uniform_grid(1.0, 3);
  std::vector<double> bad(21, 0.0);
  bad[0] = 0.5;  // mass 0.5
  CHECK_THROWS_AS(catbound::solve_forward(model, 20, bad, grid, 1e-10), catbound::ModelError);
  bad[0] = 1.5;
  bad[1] = -0.5;
  CHECK_THROWS_AS(catbound::solve_forward(model, 20, bad, grid, 1e-10), catbound::ModelError);
}

TEST_CASE("pair diagnostics: identical initial vectors") {
  const auto model = QueueModel::example_corrected();
  BoundOptions opt;
  opt.truncation = 60;
  opt.t_max = 2.0;
  opt.grid = 21;
  const auto report =
      catbound::compute_bound_report(model, WeightSequence::linear(), opt);
  const auto grid = uniform_grid(2.0, 21);
  const auto p0 = testsupport::delta_vector(61, 0);
  const auto diag =
      catbound::pair_diagnostics(model, 60, p0, p0, WeightSequence::linear(), report, grid,
                                 1e-10);
  CHECK_FALSE(diag.ratios_defined);
  for (double v : diag.norm_1d) CHECK(v == 0.0);
  for (double r : diag.ratio) CHECK(std::isnan(r));
}

TEST_CASE("pair diagnostics: corrected example satisfies its envelope") {
  const auto model = QueueModel::example_corrected();
  BoundOptions opt;
  opt.truncation = 100;
  opt.t_max = 5.0;
  opt.grid = 51;
  const auto w = WeightSequence::linear();
  const auto report = catbound::compute_bound_report(model, w, opt);
  const auto grid = uniform_grid(5.0, 51);
  const auto diag = catbound::pair_diagnostics(model, 100, testsupport::delta_vector(101, 0),
                                               testsupport::delta_vector(101, 5), w, report,
                                               grid, 1e-10);
  CHECK(diag.weighted_initial_norm == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(diag.ratios_defined);
  CHECK(diag.violation_ratio <= 1.0 + 1e-6);
  CHECK(diag.norm_equivalence_violation <= 1e-12);
  // ||D y(t)|| <= e^{-I(t)} ||D y(0)|| with I(t) = t - sin(2 pi t)/(2 pi).
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double integral =
        grid[i] - std::sin(2.0 * std::numbers::pi * grid[i]) / (2.0 * std::numbers::pi);
    CHECK(diag.norm_1d[i] <= 7.0 * std::exp(-integral) * (1.0 + 1e-6));
  }
  // Mean bound (d0 + d_5)/W e^{-I} dominates |E(t,5) - E(t,0)|.
  REQUIRE(diag.bound_mean.has_value());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(diag.mean_abs_diff[i] <= (*diag.bound_mean)[i] * (1.0 + 1e-6));
  }
}

TEST_CASE("M/M/1 with catastrophes contracts at rate c under identity weights") {
  const double c = 0.8;
  const auto model = testsupport::mm1_with_catastrophes(1.2, 1.6, c, 50);
  BoundOptions opt;
  opt.truncation = 50;
  opt.t_max = 4.0;
  opt.grid = 41;
  const auto w = WeightSequence::constant_one();
  const auto report = catbound::compute_bound_report(model, w, opt);
  const auto grid = uniform_grid(4.0, 41);
  const auto diag = catbound::pair_diagnostics(model, 50, testsupport::delta_vector(51, 0),
                                               testsupport::delta_vector(51, 3), w, report,
                                               grid, 1e-10);
  REQUIRE(diag.bound_uniform.has_value());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // ||y(t)||_1 <= 2 e^{-c t}.
    CHECK(diag.norm_l1[i] <= 2.0 * std::exp(-c * grid[i]) * (1.0 + 1e-6));
    CHECK((*diag.bound_uniform)[i] ==
          doctest::Approx(2.0 * std::exp(-c * grid[i])).epsilon(1e-8));
  }
  CHECK(diag.violation_ratio <= 1.0 + 1e-6);
}

TEST_CASE("norm equivalence holds along solved pairs") {
  std::mt19937_64 rng(77);
  const auto model = testsupport::mm1_with_catastrophes(1.0, 1.4, 0.5, 30);
  BoundOptions opt;
  opt.truncation = 30;
  opt.t_max = 2.0;
  opt.grid = 11;
  const auto w = WeightSequence::explicit_tail({1.0, 2.0, 1.5}, {});
  const auto report = catbound::compute_bound_report(model, w, opt);
  const auto grid = uniform_grid(2.0, 11);
  const auto pa = testsupport::random_stochastic(rng, 31);
  const auto pb = testsupport::random_stochastic(rng, 31);
  const auto diag = catbound::pair_diagnostics(model, 30, pa, pb, w, report, grid, 1e-10);
  CHECK(diag.norm_equivalence_violation <= 1e-12);
}

TEST_CASE("conditional mean: trivial and bounded cases") {
  SUBCASE("zero generator keeps E(t,0) = 0") {
    const auto model = QueueModel::level_jump(TimeFunction::constant(0.0),
                                              TimeFunction::constant(0.0),
                                              CatastropheSpec::none(),
                                              BSequence::cubic_telescoping());
    const auto grid = uniform_grid(2.0, 5);
    const auto mean = catbound::conditional_mean(model, 10, 0, grid, 1e-10);
    for (double v : mean) CHECK(v == 0.0);
  }

  SUBCASE("under-truncation warns") {
    // Pure birth at a brisk rate with a tiny truncation pushes mass into the
    // top decile.
    const auto model = testsupport::mm1_with_catastrophes(3.0, 0.0, 0.0, 5);
    const auto grid = uniform_grid(3.0, 7);
    std::vector<std::string> warnings;
    catbound::conditional_mean(model, 5, 0, grid, 1e-10, &warnings);
    CHECK(!warnings.empty());
  }
}

TEST_CASE("limiting regime: zero arrivals collapse to the empty state") {
  const auto model = QueueModel::level_jump(
      TimeFunction::constant(0.0), TimeFunction::constant(1.0),
      CatastropheSpec::uniform(TimeFunction::constant(1.0, 1.0)),
      BSequence::cubic_telescoping());
  BoundOptions opt;
  opt.truncation = 20;
  opt.t_max = 12.0;
  opt.grid = 25;
  const auto w = WeightSequence::linear();
  const auto report = catbound::compute_bound_report(model, w, opt);
  const auto check =
      catbound::limiting_regime_check(model, 20, w, report, {10.0, 12.0}, 1e-10);
  // All mass reaches state 0, so ||p||_1D -> d_0 = 1.
  CHECK(check.observed_sup == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(check.pass);
}

TEST_CASE("truncation stability of the example trajectory") {
  // The reflecting closure diverts the arrival flux lambda(t) B_{N+1} that
  // would leave the truncation, so doubling N moves the trajectory by at
  // most that flux integrated over the horizon, and the gap shrinks with
  // B_{N+1} ~ 2/N^2 as N doubles.
  const auto model = QueueModel::example_corrected();
  const double t_max = 5.0;
  const auto grid = uniform_grid(t_max, 11);
  auto run = [&](std::size_t n) {
    return catbound::solve_forward(model, n, testsupport::delta_vector(n + 1, 0), grid, 1e-10);
  };
  const auto t50 = run(50);
  const auto t100 = run(100);
  const auto t200 = run(200);
  auto gap = [&](const catbound::Trajectory& a, const catbound::Trajectory& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double l1 = 0.0;
      for (std::size_t k = 0; k < a.dimension(); ++k) {
        l1 += std::abs(a.probabilities[i][k] - b.probabilities[i][k]);
      }
      worst = std::max(worst, l1);
    }
    return worst;
  };
  const double g50 = gap(t50, t100);
  const double g100 = gap(t100, t200);
  const double flux_budget_50 = model.lambda().upper_bound() * b_partial_tail(model, 51) * t_max;
  const double flux_budget_100 =
      model.lambda().upper_bound() * b_partial_tail(model, 101) * t_max;
  CHECK(g50 <= flux_budget_50);
  CHECK(g100 <= flux_budget_100);
  // Quadratic decay of the diverted mass: doubling N divides the gap by ~4.
  CHECK(g100 < 0.5 * g50);
}

TEST_CASE("solver statistics are populated") {
  const auto model = QueueModel::example_corrected();
  const auto grid = uniform_grid(1.0, 3);
  const auto traj =
      catbound::solve_forward(model, 50, testsupport::delta_vector(51, 0), grid, 1e-8);
  CHECK(traj.stats.steps > 0);
  CHECK(traj.stats.rhs_evals > traj.stats.steps);
  CHECK(traj.stats.max_local_error <= 1.0);
}
