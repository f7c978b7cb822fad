// catbound: convergence-rate bounds for nonstationary queueing models with
// catastrophes, checked against direct integration of the Kolmogorov system
// and Monte Carlo simulation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catbound/bounds.hpp"
#include "catbound/errors.hpp"
#include "catbound/io.hpp"
#include "catbound/model.hpp"
#include "catbound/montecarlo.hpp"
#include "catbound/solver.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitBoundUndefined = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitVerificationFailed = 4;

constexpr double kRatioTolerance = 1.0 + 1e-6;
const std::vector<std::size_t> kVerifyStates = {1, 5, 20};

struct RunConfig {
  std::string model_path;
  std::string weights_selector = "linear";
  bool weights_from_flag = false;
  std::size_t truncation = 200;
  double t_max = 10.0;
  std::size_t grid = 201;
  double tol = 1e-10;
  std::size_t paths = 10000;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  bool json_output = false;
  std::size_t initial_state = 0;
  bool event_log = false;
  std::optional<double> assume_beta_ss;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg, bool needs_model) {
  if (needs_model) {
    cmd->add_option("--model", cfg.model_path, "Model specification (JSON)")->required();
  }
  cmd->add_option("--weights", cfg.weights_selector,
                  "Weight sequence: linear|one|geometric:RHO|file:PATH");
  cmd->add_option("--trunc", cfg.truncation, "Truncation level N")->check(CLI::PositiveNumber);
  cmd->add_option("--tmax", cfg.t_max, "Time horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--grid", cfg.grid, "Output grid points")->check(CLI::Range(2, 100000));
  cmd->add_option("--tol", cfg.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--paths", cfg.paths, "Monte Carlo path count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Monte Carlo seed");
  cmd->add_option("--out", cfg.out_dir, "Output directory");
  cmd->add_flag("--json", cfg.json_output, "Machine-readable summary on stdout");
}

catbound::WeightSequence resolve_weights(const RunConfig& cfg,
                                         const catbound::ModelSpec& spec) {
  if (!cfg.weights_from_flag && spec.weights) return *spec.weights;
  return catbound::parse_weight_selector(cfg.weights_selector);
}

catbound::BoundOptions bound_options(const RunConfig& cfg, const catbound::PaperClaims& claims) {
  catbound::BoundOptions opt;
  opt.truncation = cfg.truncation;
  opt.t_max = cfg.t_max;
  opt.grid = cfg.grid;
  opt.claims = claims;
  return opt;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_report_files(const fs::path& dir, const catbound::BoundReport& report,
                        const catbound::WeightSequence& weights) {
  catbound::atomic_write_file(dir / "bounds.json", catbound::bound_report_to_json(report));
  std::ostringstream beta;
  catbound::write_beta_csv(beta, report, weights);
  catbound::atomic_write_file(dir / "beta.csv", beta.str());
}

std::string fmt(double v) { return catbound::format_float(v); }

void print_report_summary(const catbound::BoundReport& report) {
  std::cout << "truncation N = " << report.truncation_n
            << (report.tail_certified ? " (tail certified)" : " (truncated infimum)") << "\n";
  std::cout << "b*   (sup beta*)        = " << fmt(report.b_star) << "\n";
  std::cout << "mean beta** per period  = " << fmt(report.beta_ss_mean) << "\n";
  if (report.envelope) {
    std::cout << "R**                     = " << fmt(report.envelope->r_star_star) << "\n";
    std::cout << "b**                     = " << fmt(report.envelope->b_star_star) << "\n";
  } else {
    std::cout << "envelope                : " << report.envelope_failure << "\n";
  }
  if (report.limiting_bound) {
    std::cout << "limiting-regime bound   = " << fmt(*report.limiting_bound) << "\n";
  }
  if (report.limiting_bound_claimed) {
    std::cout << "claimed-constants bound = " << fmt(*report.limiting_bound_claimed) << "\n";
  }
  for (const auto& d : report.discrepancies) {
    std::cout << "discrepancy " << d.quantity << ": first-principles "
              << fmt(d.first_principles) << " vs claimed " << fmt(d.claimed)
              << (d.claim_sound ? " (claim sound)" : " (claim NOT sound)") << "\n";
  }
}

struct VerifyOutcome {
  std::vector<std::pair<std::size_t, catbound::PairDiagnostics>> pairs;
  double max_ratio = 0.0;
  bool any_defined = false;
  bool pass = true;
};

VerifyOutcome run_verification(const catbound::QueueModel& model,
                               const catbound::WeightSequence& weights,
                               const catbound::BoundReport& report, const RunConfig& cfg,
                               const fs::path& dir) {
  VerifyOutcome outcome;
  const auto grid = catbound::uniform_grid(cfg.t_max, cfg.grid);
  for (std::size_t j : kVerifyStates) {
    if (j > cfg.truncation) continue;
    std::vector<double> p0(cfg.truncation + 1, 0.0), pj(cfg.truncation + 1, 0.0);
    p0[0] = 1.0;
    pj[j] = 1.0;
    auto diag = catbound::pair_diagnostics(model, cfg.truncation, p0, pj, weights, report,
                                           grid, cfg.tol);
    std::ostringstream csv;
    catbound::write_pair_csv(csv, diag);
    catbound::atomic_write_file(dir / ("pair_j" + std::to_string(j) + ".csv"), csv.str());
    if (diag.ratios_defined) {
      outcome.any_defined = true;
      outcome.max_ratio = std::max(outcome.max_ratio, diag.violation_ratio);
      if (diag.violation_ratio > kRatioTolerance) outcome.pass = false;
    }
    outcome.pairs.emplace_back(j, std::move(diag));
  }
  return outcome;
}

void print_verification(const VerifyOutcome& outcome) {
  for (const auto& [j, diag] : outcome.pairs) {
    std::cout << "pair (delta_0, delta_" << j << "): ";
    if (!diag.ratios_defined) {
      std::cout << "ratios undefined (zero initial difference)\n";
      continue;
    }
    std::cout << "max violation ratio = " << fmt(diag.violation_ratio)
              << (diag.violation_ratio <= kRatioTolerance ? "  OK" : "  VIOLATED") << "\n";
  }
}

int cmd_bound(const RunConfig& cfg) {
  const auto spec = catbound::load_model_spec(cfg.model_path);
  const auto weights = resolve_weights(cfg, spec);
  const auto report =
      catbound::compute_bound_report(spec.model, weights, bound_options(cfg, spec.claims));
  const fs::path dir = prepare_out_dir(cfg);
  write_report_files(dir, report, weights);
  if (cfg.json_output) {
    std::cout << catbound::bound_report_to_json(report);
  } else {
    print_report_summary(report);
  }
  return report.envelope ? kExitOk : kExitBoundUndefined;
}

int cmd_solve(const RunConfig& cfg) {
  const auto spec = catbound::load_model_spec(cfg.model_path);
  const auto weights = resolve_weights(cfg, spec);
  if (cfg.initial_state > cfg.truncation) {
    throw catbound::ModelError("--init exceeds the truncation level");
  }
  const auto grid = catbound::uniform_grid(cfg.t_max, cfg.grid);
  std::vector<double> p0(cfg.truncation + 1, 0.0);
  p0[cfg.initial_state] = 1.0;
  const auto trajectory =
      catbound::solve_forward(spec.model, cfg.truncation, p0, grid, cfg.tol, weights);
  const fs::path dir = prepare_out_dir(cfg);
  std::ostringstream csv;
  catbound::write_trajectory_csv(csv, trajectory);
  catbound::atomic_write_file(dir / "trajectory.csv", csv.str());
  for (const auto& w : trajectory.warnings) std::cerr << "warning: " << w << "\n";
  if (cfg.json_output) {
    json j;
    j["steps"] = trajectory.stats.steps;
    j["rejected_steps"] = trajectory.stats.rejected;
    j["rhs_evaluations"] = trajectory.stats.rhs_evals;
    j["final_tail_defect"] = trajectory.tail_defect.back();
    j["final_mean"] = trajectory.mean.back();
    j["final_norm_1D"] = trajectory.weighted_norm.back();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "integrated to t = " << fmt(trajectory.times.back()) << " in "
              << trajectory.stats.steps << " steps (" << trajectory.stats.rejected
              << " rejected); final conservation defect "
              << fmt(trajectory.tail_defect.back()) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const auto spec = catbound::load_model_spec(cfg.model_path);
  const auto weights = resolve_weights(cfg, spec);
  catbound::BoundReport report =
      cfg.assume_beta_ss
          ? catbound::asserted_constant_rate_report(*cfg.assume_beta_ss, weights,
                                                    bound_options(cfg, spec.claims))
          : catbound::compute_bound_report(spec.model, weights,
                                           bound_options(cfg, spec.claims));
  const fs::path dir = prepare_out_dir(cfg);
  const auto outcome = run_verification(spec.model, weights, report, cfg, dir);
  if (cfg.json_output) {
    json j;
    j["max_ratio"] = outcome.any_defined ? json(outcome.max_ratio) : json(nullptr);
    j["pass"] = outcome.pass;
    json pairs = json::array();
    for (const auto& [state, diag] : outcome.pairs) {
      pairs.push_back({{"j", state},
                       {"ratios_defined", diag.ratios_defined},
                       {"violation_ratio", diag.ratios_defined ? json(diag.violation_ratio)
                                                               : json(nullptr)}});
    }
    j["pairs"] = pairs;
    std::cout << j.dump(2) << "\n";
  } else {
    print_verification(outcome);
  }
  return outcome.pass ? kExitOk : kExitVerificationFailed;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto spec = catbound::load_model_spec(cfg.model_path);
  const auto weights = resolve_weights(cfg, spec);
  const auto grid = catbound::uniform_grid(cfg.t_max, cfg.grid);

  // Evaluation times: the output-grid nodes closest to the whole numbers in
  // (0, t_max], always including the final time.
  std::vector<double> eval_times;
  for (double target = 1.0; target < cfg.t_max - 1e-9; target += 1.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (std::abs(grid[i] - target) < std::abs(grid[best] - target)) best = i;
    }
    if (eval_times.empty() || grid[best] > eval_times.back()) eval_times.push_back(grid[best]);
  }
  if (eval_times.empty() || eval_times.back() < grid.back()) eval_times.push_back(grid.back());

  std::vector<double> p0(cfg.truncation + 1, 0.0);
  p0[cfg.initial_state] = 1.0;
  const auto trajectory =
      catbound::solve_forward(spec.model, cfg.truncation, p0, grid, cfg.tol, weights);
  const auto ensemble =
      catbound::simulate_paths(spec.model, static_cast<std::uint32_t>(cfg.initial_state),
                               cfg.t_max, cfg.paths, cfg.seed, eval_times);

  const fs::path dir = prepare_out_dir(cfg);
  std::ostringstream csv;
  catbound::write_ensemble_csv(csv, ensemble);
  catbound::atomic_write_file(dir / "ensemble.csv", csv.str());
  if (cfg.event_log) {
    std::ostringstream log;
    catbound::write_event_log(log, ensemble);
    catbound::atomic_write_file(dir / "events.jsonl", log.str());
  }

  json results = json::array();
  for (double t : eval_times) {
    const auto tv = catbound::compare_tv(ensemble, trajectory, t);
    results.push_back(
        {{"t", t}, {"tv", tv.tv}, {"stderr", tv.standard_error}});
    if (!cfg.json_output) {
      std::cout << "t = " << fmt(t) << ": TV(empirical, ODE) = " << fmt(tv.tv) << " +/- "
                << fmt(tv.standard_error) << "\n";
    }
  }
  if (cfg.json_output) {
    std::cout << json({{"paths", cfg.paths}, {"seed", cfg.seed}, {"tv", results}}).dump(2)
              << "\n";
  }
  return kExitOk;
}

catbound::PaperClaims paper_example_claims() {
  catbound::PaperClaims claims;
  claims.beta_ss_lambda_coefficient = 0.5;
  claims.beta_ss_form = catbound::TrigPoly(1.0, {{1.0, 2.0, 0.0}});
  claims.r_star_star = 2.0;
  claims.b_star_star = 1.0;
  claims.b_star = 4.0;
  claims.limiting_bound = 8.0;
  return claims;
}

int cmd_example(const std::string& variant, RunConfig cfg) {
  const bool paper = variant == "paper";
  catbound::ModelSpec spec;
  spec.model =
      paper ? catbound::QueueModel::example_paper() : catbound::QueueModel::example_corrected();
  spec.weights = catbound::WeightSequence::linear();
  if (paper) spec.claims = paper_example_claims();

  const fs::path dir = prepare_out_dir(cfg);
  const std::string spec_name = paper ? "example_paper.json" : "example_corrected.json";
  catbound::atomic_write_file(dir / spec_name, catbound::serialize_model_spec(spec));

  const auto weights = resolve_weights(cfg, spec);
  const auto report =
      catbound::compute_bound_report(spec.model, weights, bound_options(cfg, spec.claims));
  write_report_files(dir, report, weights);

  const auto grid = catbound::uniform_grid(cfg.t_max, cfg.grid);
  std::vector<double> p0(cfg.truncation + 1, 0.0);
  p0[0] = 1.0;
  const auto trajectory =
      catbound::solve_forward(spec.model, cfg.truncation, p0, grid, cfg.tol, weights);
  std::ostringstream csv;
  catbound::write_trajectory_csv(csv, trajectory);
  catbound::atomic_write_file(dir / "trajectory.csv", csv.str());

  const auto outcome = run_verification(spec.model, weights, report, cfg, dir);

  const auto check = catbound::limiting_regime_check(
      spec.model, cfg.truncation, weights, report, {0.8 * cfg.t_max, cfg.t_max}, cfg.tol);

  if (cfg.json_output) {
    json j;
    j["variant"] = variant;
    j["report"] = json::parse(catbound::bound_report_to_json(report));
    j["verification"] = {{"pass", outcome.pass},
                         {"max_ratio", outcome.any_defined ? json(outcome.max_ratio)
                                                           : json(nullptr)}};
    j["limiting_regime"] = {{"observed_sup", check.observed_sup},
                            {"bound", check.bound ? json(*check.bound) : json(nullptr)},
                            {"pass", check.pass}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "built-in example (" << variant << " variant), files in " << dir.string()
              << "\n\n";
    print_report_summary(report);
    std::cout << "\n";
    print_verification(outcome);
    std::cout << "limiting regime: observed sup ||p||_1D over [" << fmt(0.8 * cfg.t_max)
              << ", " << fmt(cfg.t_max) << "] = " << fmt(check.observed_sup);
    if (check.bound) {
      std::cout << " vs bound " << fmt(*check.bound) << (check.pass ? "  OK" : "  VIOLATED");
    } else {
      std::cout << " (no envelope, no bound)";
    }
    std::cout << "\n";
  }
  return outcome.pass ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence-rate bounds for nonstationary Markovian queueing models with "
               "catastrophes, with ODE and Monte Carlo verification"};
  app.require_subcommand(1);

  RunConfig bound_cfg, solve_cfg, verify_cfg, simulate_cfg, example_cfg;
  std::string example_variant;

  auto* bound = app.add_subcommand("bound", "Compute the bound report (bounds.json, beta.csv)");
  add_common_options(bound, bound_cfg, true);

  auto* solve = app.add_subcommand("solve", "Integrate the forward Kolmogorov system");
  add_common_options(solve, solve_cfg, true);
  solve->add_option("--init", solve_cfg.initial_state, "Initial state (delta vector)");

  auto* verify = app.add_subcommand(
      "verify", "Check the bound curves against solved trajectory pairs (delta_0 vs delta_j)");
  add_common_options(verify, verify_cfg, true);
  double assume_beta = 0.0;
  auto* assume_opt = verify->add_option(
      "--assume-beta-ss", assume_beta,
      "Verify against a user-asserted constant contraction rate instead of the computed one");

  auto* simulate = app.add_subcommand("simulate",
                                      "Thinning simulation plus total-variation comparison");
  add_common_options(simulate, simulate_cfg, true);
  simulate->add_option("--init", simulate_cfg.initial_state, "Initial state");
  simulate->add_flag("--events", simulate_cfg.event_log, "Also write per-path event log");

  auto* example = app.add_subcommand("example", "Run the built-in example end to end");
  example->add_option("variant", example_variant, "paper | corrected")
      ->required()
      ->check(CLI::IsMember({"paper", "corrected"}));
  add_common_options(example, example_cfg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (bound->parsed()) {
      bound_cfg.weights_from_flag = bound->count("--weights") > 0;
      return cmd_bound(bound_cfg);
    }
    if (solve->parsed()) {
      solve_cfg.weights_from_flag = solve->count("--weights") > 0;
      return cmd_solve(solve_cfg);
    }
    if (verify->parsed()) {
      verify_cfg.weights_from_flag = verify->count("--weights") > 0;
      if (assume_opt->count() > 0) verify_cfg.assume_beta_ss = assume_beta;
      return cmd_verify(verify_cfg);
    }
    if (simulate->parsed()) {
      simulate_cfg.weights_from_flag = simulate->count("--weights") > 0;
      return cmd_simulate(simulate_cfg);
    }
    if (example->parsed()) {
      example_cfg.weights_from_flag = example->count("--weights") > 0;
      return cmd_example(example_variant, example_cfg);
    }
  } catch (const catbound::BoundUndefinedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBoundUndefined;
  } catch (const catbound::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const catbound::MajorantViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const catbound::QuadratureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const catbound::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}
