#include "catbound/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "catbound/errors.hpp"

namespace catbound {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Fixed splitting rule: stream k is seeded independently of every other
/// stream, so path order and worker count cannot change the results.
std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path) {
  return splitmix64(splitmix64(seed) ^ splitmix64(path + 0x51AB1E5EEDULL));
}

double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) {
  double u = u01(rng);
  if (u == 0.0) u = 0x1.0p-53;  // keep holding times strictly positive
  return -std::log1p(-u) / rate;
}

/// Rigorous per-state majorant of the total outflow rate over all t.
class Majorant {
 public:
  explicit Majorant(const QueueModel& model) : model_(&model) {
    if (model.is_level_jump()) {
      lambda_ub_ = model.lambda().upper_bound();
      mu_ub_ = model.mu().upper_bound();
    }
  }

  double at(std::size_t x) {
    if (x < cache_.size() && cache_[x] >= 0.0) return cache_[x];
    double v;
    if (model_->is_level_jump()) {
      v = lambda_ub_ * model_->b_sequence().tail_sum(x + 1);
      if (x >= 1) v += mu_ub_ + model_->catastrophes().upper_bound_at(x);
    } else {
      v = 0.0;
      for (const auto& e : model_->arrivals()) {
        if (e.from == x) v += e.rate.upper_bound();
      }
      for (const auto& e : model_->services()) {
        if (e.from == x) v += e.rate.upper_bound();
      }
      if (x >= 1) v += model_->catastrophes().upper_bound_at(x);
    }
    if (x >= cache_.size()) cache_.resize(x + 1, -1.0);
    cache_[x] = v;
    return v;
  }

 private:
  const QueueModel* model_;
  double lambda_ub_ = 0.0;
  double mu_ub_ = 0.0;
  std::vector<double> cache_;
};

struct CategoryRates {
  double arrival = 0.0;
  double service = 0.0;
  double catastrophe = 0.0;
  double total() const { return arrival + service + catastrophe; }
};

CategoryRates instantaneous_rates(const QueueModel& model, std::size_t x, double t) {
  CategoryRates r;
  r.arrival = model.arrival_outflow(x, t);
  r.service = model.service_outflow(x, t);
  if (x >= 1) r.catastrophe = model.catastrophes().value(x, t);
  return r;
}

/// Arrival target for the level-jump family: i > x with probability
/// b_i / B_{x+1}, by sequential inversion of the target weights.
std::size_t sample_level_jump_target(const QueueModel& model, std::size_t x, double u) {
  const auto& b = model.b_sequence();
  const double total = b.tail_sum(x + 1);
  const double threshold = u * total;
  double cum = 0.0;
  std::size_t i = x + 1;
  const std::size_t limit = x + 2000000;
  while (i < limit) {
    cum += b.at(i);
    if (cum >= threshold) return i;
    if (b.family == BSequence::Family::explicit_list && i >= b.explicit_size()) break;
    ++i;
  }
  return i;  // numerically exhausted tail
}

std::size_t sample_general_target(const std::vector<RateEntry>& entries, std::size_t x, double t,
                                  double u, double total, bool up) {
  const double threshold = u * total;
  double cum = 0.0;
  std::size_t target = x;
  for (const auto& e : entries) {
    if (e.from != x) continue;
    cum += e.rate(t);
    target = up ? x + e.jump : x - e.jump;
    if (cum >= threshold) return target;
  }
  return target;
}

}  // namespace

std::uint32_t PathEnsemble::state_at(std::size_t path, double t) const {
  std::uint32_t state = initial_state;
  for (const auto& e : paths[path]) {
    if (e.time > t) break;
    state = e.to;
  }
  return state;
}

std::size_t PathEnsemble::max_state() const {
  std::size_t m = initial_state;
  for (const auto& path : paths) {
    for (const auto& e : path) m = std::max<std::size_t>(m, e.to);
  }
  return m;
}

PathEnsemble simulate_paths(const QueueModel& model, std::uint32_t x0, double t_max,
                            std::size_t path_count, std::uint64_t seed,
                            std::span<const double> evaluation_times) {
  if (!(t_max > 0.0) || path_count == 0) {
    throw ModelError("simulation needs t_max > 0 and at least one path");
  }
  PathEnsemble ensemble;
  ensemble.seed = seed;
  ensemble.path_count = path_count;
  ensemble.initial_state = x0;
  ensemble.t_max = t_max;
  ensemble.paths.resize(path_count);
  ensemble.evaluation_times.assign(evaluation_times.begin(), evaluation_times.end());

  Majorant majorant(model);
  for (std::size_t path = 0; path < path_count; ++path) {
    std::mt19937_64 rng(path_stream_seed(seed, path));
    auto& events = ensemble.paths[path];
    std::size_t x = x0;
    double t = 0.0;
    while (true) {
      const double big = majorant.at(x);
      if (big <= 0.0) break;  // absorbing state (no outflow ever)
      t += exponential(rng, big);
      if (t >= t_max) break;
      const CategoryRates rates = instantaneous_rates(model, x, t);
      const double total = rates.total();
      if (total > big * (1.0 + 1e-12)) {
        throw MajorantViolationError("total rate " + std::to_string(total) + " exceeds the "
                                     "majorant " + std::to_string(big) + " in state " +
                                     std::to_string(x));
      }
      if (u01(rng) * big >= total) continue;  // thinned proposal
      // Accepted: pick the category proportionally to instantaneous rates.
      const double pick = u01(rng) * total;
      std::size_t next;
      JumpKind kind;
      if (pick < rates.arrival) {
        kind = JumpKind::arrival;
        const double u = rates.arrival > 0.0 ? pick / rates.arrival : 0.0;
        next = model.is_level_jump()
                   ? sample_level_jump_target(model, x, u)
                   : sample_general_target(model.arrivals(), x, t, u, rates.arrival, true);
      } else if (pick < rates.arrival + rates.service) {
        kind = JumpKind::service;
        const double u = rates.service > 0.0 ? (pick - rates.arrival) / rates.service : 0.0;
        next = model.is_level_jump()
                   ? x - 1
                   : sample_general_target(model.services(), x, t, u, rates.service, false);
      } else {
        kind = JumpKind::catastrophe;
        next = 0;
      }
      events.push_back({t, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(next),
                        kind});
      x = next;
    }
  }

  // Empirical distribution and binomial standard errors per evaluation time.
  const std::size_t states = ensemble.max_state() + 1;
  const double m = static_cast<double>(path_count);
  for (double t : ensemble.evaluation_times) {
    std::vector<double> counts(states, 0.0);
    for (std::size_t path = 0; path < path_count; ++path) {
      counts[ensemble.state_at(path, t)] += 1.0;
    }
    std::vector<double> p(states), se(states);
    for (std::size_t k = 0; k < states; ++k) {
      p[k] = counts[k] / m;
      se[k] = std::sqrt(p[k] * (1.0 - p[k]) / m);
    }
    ensemble.empirical.push_back(std::move(p));
    ensemble.standard_error.push_back(std::move(se));
  }
  return ensemble;
}

TvComparison compare_tv(const PathEnsemble& ensemble, const Trajectory& trajectory, double t,
                        std::size_t bootstrap_resamples) {
  auto find_index = [&](std::span<const double> grid, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i] - t) <= 1e-9) return i;
    }
    throw ModelError(std::string("time ") + std::to_string(t) + " is not on the " + what +
                     " grid");
  };
  const std::size_t ei = find_index(ensemble.evaluation_times, "ensemble evaluation");
  const std::size_t ti = find_index(trajectory.times, "trajectory output");

  const auto& ode = trajectory.probabilities[ti];
  const std::size_t support = ode.size();  // TV over the truncated support
  auto tv_of = [&](const std::vector<double>& empirical) {
    double tv = 0.0;
    for (std::size_t k = 0; k < support; ++k) {
      const double pk = k < empirical.size() ? empirical[k] : 0.0;
      tv += std::abs(pk - ode[k]);
    }
    return 0.5 * tv;
  };

  TvComparison out;
  out.tv = tv_of(ensemble.empirical[ei]);
  out.bootstrap_resamples = bootstrap_resamples;
  if (bootstrap_resamples < 2) return out;

  // Bootstrap over paths, seeded independently of the simulation streams.
  const std::size_t m = ensemble.path_count;
  std::vector<std::uint32_t> states(m);
  for (std::size_t path = 0; path < m; ++path) states[path] = ensemble.state_at(path, t);
  std::mt19937_64 rng(splitmix64(ensemble.seed ^ 0xB007B007B007ULL));
  std::vector<double> tvs(bootstrap_resamples);
  std::vector<double> resampled(ensemble.empirical[ei].size());
  for (std::size_t r = 0; r < bootstrap_resamples; ++r) {
    std::fill(resampled.begin(), resampled.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t pick = static_cast<std::size_t>(rng() % m);
      resampled[states[pick]] += 1.0;
    }
    for (double& v : resampled) v /= static_cast<double>(m);
    tvs[r] = tv_of(resampled);
  }
  double mean = 0.0;
  for (double v : tvs) mean += v;
  mean /= static_cast<double>(bootstrap_resamples);
  double var = 0.0;
  for (double v : tvs) var += (v - mean) * (v - mean);
  var /= static_cast<double>(bootstrap_resamples - 1);
  out.standard_error = std::sqrt(var);
  return out;
}

}  // namespace catbound
