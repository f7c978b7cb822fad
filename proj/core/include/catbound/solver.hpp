#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catbound/bounds.hpp"
#include "catbound/model.hpp"
#include "catbound/rk45.hpp"
#include "catbound/weights.hpp"

namespace catbound {

/// Transient solution of the truncated forward Kolmogorov system on an
/// output grid, with the diagnostics the bound checks need.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> probabilities;  // one vector of length N+1 per time
  std::vector<double> tail_defect;                 // 1 - sum p
  std::vector<double> weighted_norm;               // sum d_k p_k
  std::vector<double> mean;                        // sum k p_k
  SolverStats stats;
  std::vector<std::string> warnings;

  std::size_t dimension() const { return probabilities.empty() ? 0 : probabilities[0].size(); }
};

std::vector<double> uniform_grid(double t_max, std::size_t points);

/// Integrate dp/dt = A(t) p with reflecting closure. p0 must be stochastic.
Trajectory solve_forward(const QueueModel& model, std::size_t n, std::span<const double> p0,
                         std::span<const double> t_grid, double tol,
                         const WeightSequence& weights = WeightSequence::constant_one());

/// Integrate the reduced system dp/dt = A*(t) p + g(t); algebraically
/// equivalent to solve_forward on stochastic vectors.
Trajectory solve_reduced(const QueueModel& model, std::size_t n, std::span<const double> p0,
                         std::span<const double> t_grid, double tol,
                         const WeightSequence& weights = WeightSequence::constant_one());

/// Norms and bound curves for a pair of solutions y = p* - p**, w = D y.
struct PairDiagnostics {
  std::vector<double> times;
  std::vector<double> norm_l1;          // ||y||_1
  std::vector<double> norm_1d;          // ||D y||
  std::vector<double> bound_lognorm3;   // exp(-I(t)) ||D y(0)||
  std::vector<double> bound_general;    // (1/d) exp(-I(t)) ||D y(0)||, vs ||y||_1
  std::optional<std::vector<double>> bound_uniform;  // (2 d*/d) exp(-I(t))
  std::vector<double> ratio;            // norm_1d / bound_lognorm3 (NaN when 0/0)

  std::vector<double> mean_abs_diff;    // |E(t) under a - E(t) under b|
  std::optional<std::vector<double>> bound_mean;  // ((d0+d_j)/W) exp(-I(t)) for delta pairs

  double weighted_initial_norm = 0.0;
  bool ratios_defined = false;
  double violation_ratio = 0.0;  // max over t and over applicable bound curves
  /// Largest relative breach of d ||y|| <= ||w|| <= d* ||y||.
  double norm_equivalence_violation = 0.0;
};

PairDiagnostics pair_diagnostics(const QueueModel& model, std::size_t n,
                                 std::span<const double> p0a, std::span<const double> p0b,
                                 const WeightSequence& weights, const BoundReport& report,
                                 std::span<const double> t_grid, double tol);

/// E(t, k) = conditional mean from the delta initial vector at state k.
/// Appends a warning when mass in the top decile of the truncation exceeds
/// 1e-6 (mean under-truncated).
std::vector<double> conditional_mean(const QueueModel& model, std::size_t n, std::size_t k,
                                     std::span<const double> t_grid, double tol,
                                     std::vector<std::string>* warnings = nullptr);

struct LimitingRegimeCheck {
  double observed_sup = 0.0;           // sup of ||p(t)||_1D over the window
  std::optional<double> bound;         // R** d0 b*/b**
  bool pass = false;                   // observed <= bound (false when no bound)
  double window_begin = 0.0;
  double window_end = 0.0;
};

/// Compare the late-window weighted norm against the limiting-regime bound.
LimitingRegimeCheck limiting_regime_check(const QueueModel& model, std::size_t n,
                                          const WeightSequence& weights,
                                          const BoundReport& report,
                                          std::pair<double, double> window, double tol,
                                          std::size_t grid_points = 41);

}  // namespace catbound
