#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "catbound/errors.hpp"

namespace catbound {

struct SolverStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double max_local_error = 0.0;  // scaled estimate of the accepted steps
};

struct Dopri5Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_min = 1e-14;
  double safety = 0.9;
};

/// Dormand-Prince 5(4) with FSAL and adaptive step control. The accepted
/// local error per step is kept below tol in the scaled max norm
/// max_i |e_i| / (abs_tol + rel_tol |y_i|). Output times are hit exactly by
/// clamping the step, so no dense interpolation error enters the results.
class Dopri5 {
 public:
  explicit Dopri5(Dopri5Options options = {}) : opt_(options) {}

  /// Advance y from t0 to t1 in place. Deterministic for fixed inputs; the
  /// step size carries over between calls.
  template <class Rhs>
  void integrate(Rhs&& rhs, double t0, double t1, std::vector<double>& y, SolverStats& stats) {
    const std::size_t dim = y.size();
    ensure_workspace(dim);
    double t = t0;
    if (t1 <= t0) return;

    rhs(t, std::span<const double>(y), std::span<double>(k_[0]));
    ++stats.rhs_evals;
    if (h_ <= 0.0) h_ = initial_step(y, k_[0], t1 - t0);

    while (t < t1) {
      double h = std::min(h_, t1 - t);
      if (h < opt_.h_min) {
        h = t1 - t;  // final sliver: finish rather than underflow
      }

      // Stages 2..6 and the 5th-order candidate.
      for (std::size_t s = 1; s < 6; ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
          double acc = 0.0;
          for (std::size_t q = 0; q < s; ++q) acc += kA[s - 1][q] * k_[q][i];
          work_[i] = y[i] + h * acc;
        }
        rhs(t + kC[s] * h, std::span<const double>(work_), std::span<double>(k_[s]));
        ++stats.rhs_evals;
      }
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (std::size_t q = 0; q < 6; ++q) acc += kB5[q] * k_[q][i];
        ynew_[i] = y[i] + h * acc;
      }
      rhs(t + h, std::span<const double>(ynew_), std::span<double>(k_[6]));
      ++stats.rhs_evals;

      // Scaled max-norm error estimate from the embedded 4th-order weights.
      double err = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double e = 0.0;
        for (std::size_t q = 0; q < 7; ++q) e += kE[q] * k_[q][i];
        e *= h;
        const double scale =
            opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
        err = std::max(err, std::abs(e) / scale);
      }

      if (err <= 1.0) {
        t += h;
        y.swap(ynew_);
        k_[0].swap(k_[6]);  // FSAL
        ++stats.steps;
        stats.max_local_error = std::max(stats.max_local_error, err);
        const double factor =
            err == 0.0 ? 5.0 : std::clamp(opt_.safety * std::pow(err, -0.2), 0.2, 5.0);
        h_ = h * factor;
      } else {
        ++stats.rejected;
        const double factor = std::clamp(opt_.safety * std::pow(err, -0.2), 0.1, 0.9);
        h_ = h * factor;
        if (h_ < opt_.h_min) {
          throw SolverError("step size underflow at t = " + std::to_string(t) +
                            " (local error " + std::to_string(err) + " x tolerance)");
        }
      }
    }
  }

  void reset_step() { h_ = 0.0; }

 private:
  void ensure_workspace(std::size_t dim) {
    if (work_.size() == dim) return;
    work_.assign(dim, 0.0);
    ynew_.assign(dim, 0.0);
    for (auto& k : k_) k.assign(dim, 0.0);
    h_ = 0.0;
  }

  double initial_step(const std::vector<double>& y, const std::vector<double>& f,
                      double span_len) const {
    double ynorm = 0.0, fnorm = 0.0;
    for (double v : y) ynorm = std::max(ynorm, std::abs(v));
    for (double v : f) fnorm = std::max(fnorm, std::abs(v));
    const double scale = opt_.abs_tol + opt_.rel_tol * ynorm;
    double h = fnorm > 0.0 ? 0.01 * std::pow(scale / fnorm, 0.2) : 1e-3;
    return std::clamp(h, 1e-8, span_len);
  }

  // Butcher tableau.
  static constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double kA[5][5] = {
      {1.0 / 5, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656}};
  static constexpr double kB5[6] = {35.0 / 384,     0.0,        500.0 / 1113,
                                    125.0 / 192,    -2187.0 / 6784, 11.0 / 84};
  static constexpr double kB4[7] = {5179.0 / 57600,  0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  static constexpr double kE[7] = {kB5[0] - kB4[0], kB5[1] - kB4[1], kB5[2] - kB4[2],
                                   kB5[3] - kB4[3], kB5[4] - kB4[4], kB5[5] - kB4[5],
                                   -kB4[6]};

  Dopri5Options opt_;
  double h_ = 0.0;
  std::vector<double> work_, ynew_;
  std::vector<double> k_[7];
};

}  // namespace catbound
