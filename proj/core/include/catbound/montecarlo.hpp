#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "catbound/model.hpp"
#include "catbound/solver.hpp"

namespace catbound {

enum class JumpKind { arrival, service, catastrophe };

struct JumpEvent {
  double time;
  std::uint32_t from;
  std::uint32_t to;
  JumpKind kind;
};

/// Sample paths of the time-inhomogeneous chain, simulated by thinning
/// against a per-state rate majorant.
struct PathEnsemble {
  std::uint64_t seed = 0;
  std::size_t path_count = 0;
  std::uint32_t initial_state = 0;
  double t_max = 0.0;
  std::vector<std::vector<JumpEvent>> paths;

  std::vector<double> evaluation_times;
  /// Empirical distribution at each evaluation time, indexed
  /// [time][state], sized to the largest observed state plus one.
  std::vector<std::vector<double>> empirical;
  /// Binomial standard errors sqrt(p(1-p)/M), same shape as `empirical`.
  std::vector<std::vector<double>> standard_error;

  std::uint32_t state_at(std::size_t path, double t) const;
  std::size_t max_state() const;
};

/// Thinning simulation: per-path independent streams derived from the seed
/// by a fixed splitting rule; bit-identical results for identical inputs.
/// Throws MajorantViolationError if an instantaneous total rate ever exceeds
/// the majorant.
PathEnsemble simulate_paths(const QueueModel& model, std::uint32_t x0, double t_max,
                            std::size_t path_count, std::uint64_t seed,
                            std::span<const double> evaluation_times);

struct TvComparison {
  double tv = 0.0;
  double standard_error = 0.0;
  std::size_t bootstrap_resamples = 0;
};

/// Total-variation distance (1/2) sum_k |p_hat_k - p_k| over the trajectory's
/// truncated support at time t, with a seeded bootstrap standard error.
TvComparison compare_tv(const PathEnsemble& ensemble, const Trajectory& trajectory, double t,
                        std::size_t bootstrap_resamples = 200);

}  // namespace catbound
