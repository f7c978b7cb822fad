#include "catbound/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "catbound/errors.hpp"
#include "catbound/generator.hpp"

namespace catbound {

namespace {

void check_stochastic(std::span<const double> p0, std::size_t dim) {
  if (p0.size() != dim) {
    throw ModelError("initial vector length " + std::to_string(p0.size()) +
                     " does not match truncation dimension " + std::to_string(dim));
  }
  double sum = 0.0;
  for (double v : p0) {
    if (v < 0.0) throw ModelError("initial vector has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ModelError("initial vector mass is " + std::to_string(sum) + ", expected 1");
  }
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.size() < 1 || t_grid[0] < 0.0) {
    throw ModelError("output grid must be nonempty and start at t >= 0");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] <= t_grid[i - 1]) throw ModelError("output grid must be increasing");
  }
}

void record_point(Trajectory& out, const std::vector<double>& p,
                  const std::vector<double>& d_weights) {
  double sum = 0.0, wnorm = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sum += p[k];
    wnorm += d_weights[k] * p[k];
    mean += static_cast<double>(k) * p[k];
  }
  out.probabilities.push_back(p);
  out.tail_defect.push_back(1.0 - sum);
  out.weighted_norm.push_back(wnorm);
  out.mean.push_back(mean);
}

template <class Rhs>
Trajectory integrate_system(Rhs&& rhs, std::size_t dim, std::span<const double> p0,
                            std::span<const double> t_grid, double tol,
                            const WeightSequence& weights) {
  check_grid(t_grid);
  std::vector<double> d_weights(dim);
  for (std::size_t k = 0; k < dim; ++k) d_weights[k] = weights[k];

  Trajectory out;
  out.times.assign(t_grid.begin(), t_grid.end());
  std::vector<double> y(p0.begin(), p0.end());
  record_point(out, y, d_weights);

  Dopri5Options opt;
  opt.abs_tol = tol;
  opt.rel_tol = tol;
  Dopri5 stepper(opt);
  bool conservation_warned = false;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    stepper.integrate(rhs, t_grid[i - 1], t_grid[i], y, out.stats);
    const double min_p = *std::min_element(y.begin(), y.end());
    if (min_p < -1e-9) {
      std::ostringstream os;
      os << "probability dropped to " << min_p << " at t = " << t_grid[i]
         << "; increase the truncation level or tighten the tolerance";
      throw SolverError(os.str());
    }
    record_point(out, y, d_weights);
    if (!conservation_warned && std::abs(out.tail_defect.back()) > 1e-9) {
      out.warnings.push_back("conservation drift " +
                             std::to_string(out.tail_defect.back()) + " at t = " +
                             std::to_string(t_grid[i]));
      conservation_warned = true;
    }
  }
  return out;
}

}  // namespace

std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (points < 2 || !(t_max > 0.0)) throw ModelError("grid needs t_max > 0 and >= 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

Trajectory solve_forward(const QueueModel& model, std::size_t n, std::span<const double> p0,
                         std::span<const double> t_grid, double tol,
                         const WeightSequence& weights) {
  check_stochastic(p0, n + 1);
  GeneratorAssembler assembler(model, n, Closure::reflecting);
  TruncatedGenerator ws = assembler.a(t_grid.empty() ? 0.0 : t_grid[0]);
  auto rhs = [&](double t, std::span<const double> x, std::span<double> dxdt) {
    assembler.fill_a(t, ws);
    ws.apply(x, dxdt);
  };
  Trajectory out = integrate_system(rhs, n + 1, p0, t_grid, tol, weights);
  for (const auto& w : assembler.warnings()) out.warnings.push_back(w);
  return out;
}

Trajectory solve_reduced(const QueueModel& model, std::size_t n, std::span<const double> p0,
                         std::span<const double> t_grid, double tol,
                         const WeightSequence& weights) {
  check_stochastic(p0, n + 1);
  GeneratorAssembler assembler(model, n, Closure::reflecting);
  auto [ws, g] = assembler.a_star(t_grid.empty() ? 0.0 : t_grid[0]);
  auto rhs = [&](double t, std::span<const double> x, std::span<double> dxdt) {
    assembler.fill_a_star(t, ws, g);
    ws.apply(x, dxdt);
    g.add_to(dxdt);
  };
  Trajectory out = integrate_system(rhs, n + 1, p0, t_grid, tol, weights);
  for (const auto& w : assembler.warnings()) out.warnings.push_back(w);
  return out;
}

PairDiagnostics pair_diagnostics(const QueueModel& model, std::size_t n,
                                 std::span<const double> p0a, std::span<const double> p0b,
                                 const WeightSequence& weights, const BoundReport& report,
                                 std::span<const double> t_grid, double tol) {
  const Trajectory a = solve_forward(model, n, p0a, t_grid, tol, weights);
  const Trajectory b = solve_forward(model, n, p0b, t_grid, tol, weights);

  std::vector<double> d_weights(n + 1);
  for (std::size_t k = 0; k <= n; ++k) d_weights[k] = weights[k];
  const WeightConstants wc = weights.constants();

  // The mean bound applies to delta initial pairs; detect them so the
  // (d0 + d_j)/W coefficient is well defined.
  auto delta_index = [n](std::span<const double> p) -> std::optional<std::size_t> {
    std::optional<std::size_t> idx;
    for (std::size_t k = 0; k <= n; ++k) {
      if (p[k] == 1.0 && !idx) {
        idx = k;
      } else if (p[k] != 0.0) {
        return std::nullopt;
      }
    }
    return idx;
  };
  const auto delta_a = delta_index(p0a);
  const auto delta_b = delta_index(p0b);

  PairDiagnostics diag;
  diag.times.assign(t_grid.begin(), t_grid.end());
  const std::size_t m = diag.times.size();
  diag.norm_l1.resize(m);
  diag.norm_1d.resize(m);
  diag.bound_lognorm3.resize(m);
  diag.bound_general.resize(m);
  diag.ratio.resize(m);
  const bool has_uniform = std::isfinite(wc.d_star);
  if (has_uniform) diag.bound_uniform.emplace(m, 0.0);
  diag.mean_abs_diff.resize(m);
  const bool has_mean_bound = wc.w > 0.0 && delta_a && delta_b;
  if (has_mean_bound) diag.bound_mean.emplace(m, 0.0);
  // ||D y(0)|| / W; for the canonical pair (delta_0, delta_j) this is
  // (d0 + d_j) / W.
  const double mean_coefficient =
      has_mean_bound ? (weights[*delta_a] + weights[*delta_b]) / wc.w : 0.0;

  for (std::size_t i = 0; i < m; ++i) {
    double l1 = 0.0, l1d = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double y = a.probabilities[i][k] - b.probabilities[i][k];
      l1 += std::abs(y);
      l1d += d_weights[k] * std::abs(y);
    }
    diag.norm_l1[i] = l1;
    diag.norm_1d[i] = l1d;
    // Norm equivalence d ||y|| <= ||w|| <= d* ||y||.
    const double lower_gap = wc.d * l1 - l1d;
    diag.norm_equivalence_violation =
        std::max(diag.norm_equivalence_violation, lower_gap / std::max(1e-300, l1d));
    if (has_uniform) {
      const double upper_gap = l1d - wc.d_star * l1;
      diag.norm_equivalence_violation =
          std::max(diag.norm_equivalence_violation, upper_gap / std::max(1e-300, l1d));
    }
  }
  diag.weighted_initial_norm = diag.norm_1d.empty() ? 0.0 : diag.norm_1d[0];

  double worst = 0.0;
  bool any_defined = false;
  // A pair with no initial difference carries no information: every curve
  // degenerates to 0 <= 0, so ratios are reported as undefined.
  const bool degenerate_pair = diag.weighted_initial_norm == 0.0;
  auto ratio_of = [&](double observed, double bound) {
    if (degenerate_pair || (bound <= 0.0 && observed <= 0.0)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (bound <= 0.0) return std::numeric_limits<double>::infinity();
    return observed / bound;
  };
  for (std::size_t i = 0; i < m; ++i) {
    const double decay = std::exp(-report.integral_at(diag.times[i]));
    diag.bound_lognorm3[i] = decay * diag.weighted_initial_norm;
    diag.bound_general[i] =
        report.convergence.general_prefactor * diag.weighted_initial_norm * decay;
    diag.mean_abs_diff[i] = std::abs(a.mean[i] - b.mean[i]);
    const double r = ratio_of(diag.norm_1d[i], diag.bound_lognorm3[i]);
    diag.ratio[i] = r;
    if (!std::isnan(r)) {
      worst = std::max(worst, r);
      any_defined = true;
    }
    const double rg = ratio_of(diag.norm_l1[i], diag.bound_general[i]);
    if (!std::isnan(rg)) {
      worst = std::max(worst, rg);
      any_defined = true;
    }
    if (has_uniform) {
      (*diag.bound_uniform)[i] = *report.convergence.uniform_coefficient * decay;
      const double ru = ratio_of(diag.norm_l1[i], (*diag.bound_uniform)[i]);
      if (!std::isnan(ru)) {
        worst = std::max(worst, ru);
        any_defined = true;
      }
    }
    if (has_mean_bound) {
      (*diag.bound_mean)[i] = mean_coefficient * decay;
      const double rm = ratio_of(diag.mean_abs_diff[i], (*diag.bound_mean)[i]);
      if (!std::isnan(rm)) {
        worst = std::max(worst, rm);
        any_defined = true;
      }
    }
  }
  diag.ratios_defined = any_defined;
  diag.violation_ratio = any_defined ? worst : std::numeric_limits<double>::quiet_NaN();
  return diag;
}

std::vector<double> conditional_mean(const QueueModel& model, std::size_t n, std::size_t k,
                                     std::span<const double> t_grid, double tol,
                                     std::vector<std::string>* warnings) {
  if (k > n) throw ModelError("initial state exceeds the truncation level");
  std::vector<double> p0(n + 1, 0.0);
  p0[k] = 1.0;
  const Trajectory traj = solve_forward(model, n, p0, t_grid, tol);
  if (warnings) {
    for (const auto& w : traj.warnings) warnings->push_back(w);
    const std::size_t k0 = (9 * (n + 1)) / 10;
    double worst = 0.0;
    for (const auto& p : traj.probabilities) {
      double tail = 0.0;
      for (std::size_t i = k0; i <= n; ++i) tail += p[i];
      worst = std::max(worst, tail);
    }
    if (worst > 1e-6) {
      warnings->push_back("mean under-truncated: top-decile mass reaches " +
                          std::to_string(worst) + "; increase N");
    }
  }
  return traj.mean;
}

LimitingRegimeCheck limiting_regime_check(const QueueModel& model, std::size_t n,
                                          const WeightSequence& weights,
                                          const BoundReport& report,
                                          std::pair<double, double> window, double tol,
                                          std::size_t grid_points) {
  if (!(window.first < window.second) || window.first < 0.0) {
    throw ModelError("limiting-regime window must satisfy 0 <= begin < end");
  }
  std::vector<double> grid;
  grid.push_back(0.0);
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid.push_back(window.first + (window.second - window.first) * static_cast<double>(i) /
                                      static_cast<double>(grid_points - 1));
  }
  std::vector<double> p0(n + 1, 0.0);
  p0[0] = 1.0;
  const Trajectory traj = solve_forward(model, n, p0, grid, tol, weights);

  LimitingRegimeCheck check;
  check.window_begin = window.first;
  check.window_end = window.second;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] >= window.first - 1e-12) {
      check.observed_sup = std::max(check.observed_sup, traj.weighted_norm[i]);
    }
  }
  check.bound = report.limiting_bound;
  // The bound allows equality; give rounding a relative hair of slack.
  check.pass =
      check.bound && check.observed_sup <= *check.bound * (1.0 + 1e-9) + 1e-12;
  return check;
}

}  // namespace catbound
