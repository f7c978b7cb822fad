#pragma once

// Shared test utilities: independent oracles (dense matrix exponential,
// closed-form two-state solution, compensated summation) and random model
// generation. Everything here stays independent of the implementation paths
// it is used to check.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "catbound/generator.hpp"
#include "catbound/model.hpp"

namespace testsupport {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Reference solution of p' = M p for a constant matrix via dense expm.
inline std::vector<double> expm_reference(const std::vector<std::vector<double>>& m,
                                          const std::vector<double>& p0, double t) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j];
  }
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = p0[i];
  Eigen::VectorXd out = (a * t).exp() * p;
  return std::vector<double>(out.data(), out.data() + n);
}

/// Two-state chain with constant rates a (0->1) and b (1->0), started in 0.
inline double two_state_p1(double a, double b, double t) {
  return a / (a + b) * (1.0 - std::exp(-(a + b) * t));
}

/// Compensated (Kahan) summation for long series oracles.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline catbound::TimeFunction random_rate(std::mt19937_64& rng, double scale = 2.0) {
  if (u01(rng) < 0.5) {
    return catbound::TimeFunction::constant(scale * u01(rng));
  }
  const double offset = scale * (0.25 + 0.75 * u01(rng));
  const double budget = offset * u01(rng);  // keep the rate provably nonnegative
  const double freq = u01(rng) < 0.5 ? 1.0 : 2.0;
  const double split = u01(rng);
  return catbound::TimeFunction::trig(
      offset, {{freq, budget * split, budget * (1.0 - split)}}, 1.0);
}

inline catbound::CatastropheSpec random_catastrophes(std::mt19937_64& rng) {
  const double pick = u01(rng);
  std::vector<catbound::TimeFunction> prefix;
  const std::size_t prefix_len = static_cast<std::size_t>(u01(rng) * 3.0);
  for (std::size_t i = 0; i < prefix_len; ++i) prefix.push_back(random_rate(rng, 1.5));
  if (pick < 0.25) return catbound::CatastropheSpec::none();
  if (pick < 0.6) {
    auto cats = catbound::CatastropheSpec::uniform(random_rate(rng, 1.5));
    cats.prefix = std::move(prefix);
    return cats;
  }
  return catbound::CatastropheSpec::power_tail(random_rate(rng, 1.5), random_rate(rng, 1.0),
                                               u01(rng) < 0.5 ? 1.0 : 2.0, std::move(prefix));
}

/// Random small model exercising both families and every rate kind.
inline catbound::QueueModel random_model(std::mt19937_64& rng, std::size_t max_state = 8) {
  if (u01(rng) < 0.5) {
    catbound::BSequence b =
        u01(rng) < 0.5
            ? catbound::BSequence::cubic_telescoping()
            : catbound::BSequence::explicit_list(
                  {0.5 * u01(rng) + 0.1, 0.3 * u01(rng), 0.2 * u01(rng)});
    return catbound::QueueModel::level_jump(random_rate(rng), random_rate(rng),
                                            random_catastrophes(rng), std::move(b));
  }
  std::vector<catbound::RateEntry> arrivals, services;
  for (std::size_t from = 0; from < max_state; ++from) {
    if (u01(rng) < 0.7) {
      arrivals.push_back({from, 1 + static_cast<std::size_t>(u01(rng) * 2.9), random_rate(rng)});
    }
    if (from >= 1 && u01(rng) < 0.7) {
      services.push_back(
          {from, 1 + static_cast<std::size_t>(u01(rng) * static_cast<double>(from - 1) * 0.99),
           random_rate(rng)});
    }
  }
  return catbound::QueueModel::general(std::move(arrivals), std::move(services),
                                       random_catastrophes(rng));
}

inline std::vector<double> random_stochastic(std::mt19937_64& rng, std::size_t dim) {
  std::vector<double> p(dim);
  double sum = 0.0;
  for (auto& v : p) {
    v = -std::log(std::max(u01(rng), 1e-12));
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

inline std::vector<double> delta_vector(std::size_t dim, std::size_t k) {
  std::vector<double> p(dim, 0.0);
  p[k] = 1.0;
  return p;
}

/// M/M/1 with constant arrival, service and catastrophe rates, written as a
/// general rate map. Arrivals are defined through state n, so a truncation
/// at n sees a defect in its last column.
inline catbound::QueueModel mm1_with_catastrophes(double lambda, double mu, double c,
                                                  std::size_t n) {
  std::vector<catbound::RateEntry> arrivals, services;
  if (lambda > 0.0) {
    for (std::size_t from = 0; from <= n; ++from) {
      arrivals.push_back({from, 1, catbound::TimeFunction::constant(lambda)});
    }
  }
  for (std::size_t from = 1; from <= n; ++from) {
    services.push_back({from, 1, catbound::TimeFunction::constant(mu)});
  }
  auto cats = c > 0.0
                  ? catbound::CatastropheSpec::uniform(catbound::TimeFunction::constant(c))
                  : catbound::CatastropheSpec::none();
  return catbound::QueueModel::general(std::move(arrivals), std::move(services),
                                       std::move(cats));
}

}  // namespace testsupport
