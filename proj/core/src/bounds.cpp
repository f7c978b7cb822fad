#include "catbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "catbound/errors.hpp"

namespace catbound {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double adaptive_integral(const std::function<double(double)>& f, double t0, double t1,
                         double tol) {
  if (t1 == t0) return 0.0;
  double error = 0.0, l1 = 0.0;
  // Terminate well below the requested tolerance so the error estimate has
  // headroom against its own conservatism.
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, t0, t1, 15, tol * 1e-3, &error, &l1);
  if (error > std::max(tol, tol * l1)) {
    std::ostringstream os;
    os << "quadrature over [" << t0 << ", " << t1 << "] reached error " << error
       << " (requested " << tol << ")";
    throw QuadratureError(os.str());
  }
  return value;
}

/// Weighted arrival-target tail sum_{i > j} d_i b_i, exact per family.
/// Throws when the series diverges (geometric weights against the cubic
/// tail).
double weighted_b_tail(const BSequence& b, const WeightSequence& w, std::size_t j) {
  if (b.family == BSequence::Family::explicit_list) {
    double s = 0.0;
    for (std::size_t i = b.explicit_size(); i > j && i >= 1; --i) s += w[i] * b.at(i);
    return s;
  }
  switch (w.kind()) {
    case WeightKind::constant_one:
      return b.tail_sum(j + 1);
    case WeightKind::linear:
      // d_i = i + 1 (i >= 1): sum (i+1) b_i telescopes termwise.
      return b.first_moment_tail(j) + b.tail_sum(j + 1);
    case WeightKind::geometric:
      throw BoundUndefinedError(
          "sum_k d_k b_k diverges: geometric weights (rho > 1) grow faster than the cubic "
          "arrival tail b_k = 4/(k(k+1)(k+2)) decays");
    case WeightKind::explicit_tail: {
      const auto& prefix = w.prefix();
      const std::size_t m = prefix.size();  // weights are explicit for k < m
      double s = 0.0;
      for (std::size_t i = j + 1; i < m; ++i) s += prefix[i] * b.at(i);
      // Affine tail d_i = c0 + c1 * i for i >= m.
      const double c1 = w.tail().slope;
      const double c0 = prefix.back() - c1 * static_cast<double>(m - 1);
      const std::size_t lo = std::max(j + 1, m);
      s += c0 * b.tail_sum(lo) + c1 * b.first_moment_tail(lo - 1);
      return s;
    }
  }
  return 0.0;
}

/// Extrema of a smooth g on [0, period] given its derivative dg: scan a fine
/// grid for sign changes of dg and bisect each to the stationary point.
std::pair<double, double> extrema_scan(const std::function<double(double)>& g,
                                       const std::function<double(double)>& dg, double period,
                                       std::size_t scan) {
  std::vector<double> candidates{0.0, period};
  double prev_t = 0.0;
  double prev_d = dg(0.0);
  for (std::size_t i = 1; i <= scan; ++i) {
    const double t = period * static_cast<double>(i) / static_cast<double>(scan);
    const double d = dg(t);
    if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
      double lo = prev_t, hi = t, flo = prev_d;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * period; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dg(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      candidates.push_back(0.5 * (lo + hi));
    } else if (d == 0.0) {
      candidates.push_back(t);
    }
    prev_t = t;
    prev_d = d;
  }
  double g_max = -std::numeric_limits<double>::infinity();
  double g_min = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    const double v = g(t);
    g_max = std::max(g_max, v);
    g_min = std::min(g_min, v);
  }
  return {g_min, g_max};
}

double drift_amplitude(const std::function<double(double)>& g,
                       const std::function<double(double)>& dg, double period,
                       std::size_t scan) {
  const auto [g_min, g_max] = extrema_scan(g, dg, period, scan);
  return g_max - g_min;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContractionRate

ContractionRate::ContractionRate(const QueueModel& model, const WeightSequence& w, std::size_t n)
    : model_(model), weights_(w), n_(n) {
  assembler_ = std::make_shared<GeneratorAssembler>(model_, n, Closure::defect_tracking);

  // Weight conjugation ratios, aligned with the assembler's entry order.
  inv_weight_.resize(n + 1);
  std::vector<double> d(n + 2);
  for (std::size_t k = 0; k <= n + 1; ++k) d[k] = weights_[k];
  for (std::size_t k = 0; k <= n; ++k) inv_weight_[k] = 1.0 / d[k];
  const auto skeleton = assembler_->a(0.0);
  weight_ratio_.clear();
  weight_ratio_.reserve(skeleton.stored_entries());
  for (std::size_t j = 0; j <= n; ++j) {
    for (const auto& e : skeleton.column(j)) weight_ratio_.push_back(d[e.row] / d[j]);
  }

  analytic_family_ = model_.is_level_jump();
  if (analytic_family_) {
    const auto& b = model_.b_sequence();
    weighted_b_total_ = weighted_b_tail(b, weights_, 0);
    weighted_b_beyond_n_ = weighted_b_tail(b, weights_, n);
    weighted_b_beyond_n1_ = weighted_b_tail(b, weights_, n + 1);
    tail_weight_inf_ = weights_.tail_inf_from(n);
    tail_service_penalty_ = std::max(0.0, weights_.tail_ratio_sup_from(n) - 1.0);
    const double d0 = weights_.d0();
    tail_cat_penalty_ =
        d0 > tail_weight_inf_
            ? model_.catastrophes().upper_bound_beyond(n) * (d0 / tail_weight_inf_ - 1.0)
            : 0.0;
    tail_certified_ = true;

    // Closed form: with level-jump arrivals the column-0 functional is
    // beta*(t) + lambda(t) (1 - sum_i d_i b_i). Certify it as the global
    // infimum by checking the matrix computation on a fine grid.
    const auto lambda_trig = model_.lambda().as_trig();
    const auto beta_star_trig = model_.catastrophes().infimum_trig();
    if (lambda_trig && beta_star_trig) {
      TrigPoly cf = *beta_star_trig;
      cf.add_scaled(*lambda_trig, 1.0 - weighted_b_total_);
      const double horizon = std::max(model_.period().value_or(1.0), 1.0);
      bool certified = true;
      for (int i = 0; i <= 1024 && certified; ++i) {
        const double t = horizon * static_cast<double>(i) / 1024.0;
        const BetaSample s = sample(t);
        const double expected = cf(t);
        if (s.tail_binds || s.argmin_column != 0 ||
            std::abs(s.value - expected) > 1e-9 * (1.0 + std::abs(expected))) {
          certified = false;
        }
      }
      if (certified) closed_form_ = cf;
    }
  }
}

double ContractionRate::weighted_b_total() const {
  if (!analytic_family_) {
    throw ModelError("weighted arrival sums require the level-jump family");
  }
  return weighted_b_total_;
}

double ContractionRate::tail_lower_bound(double t, double lambda_t, double mu_t) const {
  // For columns j > N: the catastrophe block contributes at least
  // beta*(t) - cat_penalty, the service entry at least -mu * ratio_penalty,
  // and the weighted arrival overshoot at most S_{N+1} / inf d.
  return model_.catastrophes().infimum(t) - lambda_t * weighted_b_beyond_n1_ / tail_weight_inf_ -
         mu_t * tail_service_penalty_ - tail_cat_penalty_;
}

BetaSample ContractionRate::sample(double t) const {
  const auto [gen, g] = assembler_->a_star(t);
  (void)g;
  double lambda_t = 0.0;
  if (analytic_family_) lambda_t = model_.lambda()(t);

  BetaSample best;
  best.value = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t j = 0; j <= n_; ++j) {
    double weighted_off = 0.0;
    for (const auto& e : gen.column(j)) {
      weighted_off += e.value * weight_ratio_[idx++];
    }
    double v = std::abs(gen.diagonal(j)) - weighted_off;
    if (analytic_family_) {
      // Exact correction for arrival entries beyond the truncation.
      v -= lambda_t * weighted_b_beyond_n_ * inv_weight_[j];
    }
    if (v < best.value) {
      best.value = v;
      best.argmin_column = j;
    }
  }
  if (analytic_family_) {
    const double tail = tail_lower_bound(t, lambda_t, model_.mu()(t));
    if (tail < best.value) {
      best.value = tail;
      best.argmin_column = n_ + 1;
      best.tail_binds = true;
    }
  }
  return best;
}

double ContractionRate::integrate(double t0, double t1, double tol) const {
  if (closed_form_) return closed_form_->integrate(t0, t1);
  auto f = [this](double t) { return (*this)(t); };
  return adaptive_integral(f, t0, t1, tol);
}

BetaSample beta_double_star(const QueueModel& model, const WeightSequence& w, std::size_t n,
                            double t) {
  return ContractionRate(model, w, n).sample(t);
}

double integrate_beta(const ContractionRate& beta, double t0, double t1, double tol) {
  if (t1 < t0) throw ModelError("integrate_beta requires t0 <= t1");
  return beta.integrate(t0, t1, tol);
}

// ---------------------------------------------------------------------------
// Envelope fits

EnvelopeFit fit_envelope(const TrigPoly& beta, double period) {
  if (!(period > 0.0)) throw ModelError("envelope fit needs a positive period");
  if (!beta.integer_periodic(period)) {
    throw ModelError("declared period is not a period of the rate's harmonics");
  }
  const double mean = beta.mean(period);
  if (!(mean > 0.0)) {
    throw BoundUndefinedError("not exponentially ergodic: the period mean of the contraction "
                              "rate is " + std::to_string(mean));
  }
  // G(t) = b** t - integral_0^t beta has G' = b** - beta and is periodic;
  // log R** is its peak-to-trough amplitude.
  auto g = [&](double t) { return mean * t - beta.antiderivative(t); };
  auto dg = [&](double t) { return mean - beta(t); };
  const double amp = drift_amplitude(g, dg, period, 4096);
  const double amp2 = drift_amplitude(g, dg, period, 8192);
  EnvelopeFit fit;
  fit.b_star_star = mean;
  fit.r_star_star = std::exp(amp2);
  fit.grid_error = std::abs(std::exp(amp2) - std::exp(amp));

  // Spot-check the envelope inequality on random (s, t) pairs.
  std::mt19937_64 rng(0x5eedULL);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double log_r = amp2;
  for (int i = 0; i < 10000; ++i) {
    const double s = u01() * period;
    const double t = s + u01() * 5.0 * period;
    if (g(t) - g(s) > log_r + 1e-12 * std::max(1.0, log_r)) {
      throw std::logic_error("envelope fit failed its own certificate");
    }
  }
  return fit;
}

EnvelopeFit fit_envelope(const std::function<double(double)>& beta, double period,
                         std::size_t grid) {
  if (!(period > 0.0)) throw ModelError("envelope fit needs a positive period");
  const std::size_t n = std::max<std::size_t>(grid, 512);

  auto fit_on_grid = [&](std::size_t cells, std::vector<double>* g_out) {
    std::vector<double> f(cells + 1, 0.0);
    for (std::size_t k = 1; k <= cells; ++k) {
      const double a = period * static_cast<double>(k - 1) / static_cast<double>(cells);
      const double b = period * static_cast<double>(k) / static_cast<double>(cells);
      // Per-cell estimates from Gauss-Kronrod are very conservative on tiny
      // intervals; the achieved accuracy is far below this threshold.
      f[k] = f[k - 1] + adaptive_integral(beta, a, b, 1e-11);
    }
    const double mean = f[cells] / period;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    std::vector<double> g(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
      const double t = period * static_cast<double>(k) / static_cast<double>(cells);
      g[k] = mean * t - f[k];
      g_max = std::max(g_max, g[k]);
      g_min = std::min(g_min, g[k]);
    }
    if (g_out) *g_out = std::move(g);
    return std::pair<double, double>{mean, g_max - g_min};
  };

  const auto [mean_coarse, amp_coarse] = fit_on_grid(n, nullptr);
  std::vector<double> g_fine;
  const auto [mean, amp] = fit_on_grid(2 * n, &g_fine);
  (void)mean_coarse;
  if (!(mean > 0.0)) {
    throw BoundUndefinedError("not exponentially ergodic: the period mean of the contraction "
                              "rate is " + std::to_string(mean));
  }
  EnvelopeFit fit;
  fit.b_star_star = mean;
  fit.r_star_star = std::exp(amp);
  fit.grid_error = std::abs(std::exp(amp) - std::exp(amp_coarse));

  // Random node pairs plus the grid-refinement slack stand in for a
  // continuous certificate.
  std::mt19937_64 rng(0x5eedULL);
  const double slack = fit.grid_error + 1e-12;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t a = rng() % g_fine.size();
    const std::size_t b = rng() % g_fine.size();
    if (g_fine[std::max(a, b)] - g_fine[std::min(a, b)] > amp + slack) {
      throw std::logic_error("envelope fit failed its own certificate");
    }
  }
  return fit;
}

std::pair<double, double> beta_star_sup(const QueueModel& model, double t_max) {
  const auto cf = model.catastrophes().infimum_trig();
  const auto period = model.period();
  if (cf && (cf->terms().empty() || (period && cf->integer_periodic(*period)))) {
    // Exact: extrema of a closed-form rate over one period.
    const double p = period.value_or(1.0);
    auto g = [&](double t) { return (*cf)(t); };
    auto dg = [&](double t) { return cf->derivative(t); };
    const auto [lo, hi] = extrema_scan(g, dg, p, 4096);
    (void)lo;
    return {hi, 0.0};
  }
  const double horizon = period.value_or(std::max(t_max, 1.0));
  auto sup_on = [&](std::size_t nodes) {
    double s = 0.0;
    for (std::size_t i = 0; i <= nodes; ++i) {
      s = std::max(s, beta_star(model, horizon * static_cast<double>(i) /
                                           static_cast<double>(nodes)));
    }
    return s;
  };
  const double s1 = sup_on(2048);
  const double s2 = sup_on(4096);
  return {s2, std::abs(s2 - s1)};
}

double limiting_regime_bound(double r_star_star, double d0, double b_star, double b_star_star) {
  if (!(b_star_star > 0.0)) {
    throw BoundUndefinedError("limiting-regime bound needs a positive envelope rate b**");
  }
  return r_star_star * d0 * b_star / b_star_star;
}

double limiting_regime_bound(const EnvelopeFit& envelope, double d0, double b_star) {
  return limiting_regime_bound(envelope.r_star_star, d0, b_star, envelope.b_star_star);
}

// ---------------------------------------------------------------------------
// BoundReport

double BoundReport::beta_at(double t) const {
  if (closed_form) return (*closed_form)(t);
  if (rate) return (*rate)(t);
  throw BoundUndefinedError("report carries no rate evaluator");
}

double BoundReport::integral_at(double t) const {
  if (closed_form) return closed_form->integrate(0.0, t);
  if (grid_t.empty()) throw BoundUndefinedError("report carries no integral data");
  // Cached cumulative nodes plus quadrature for the off-node remainder.
  auto it = std::upper_bound(grid_t.begin(), grid_t.end(), t);
  std::size_t k = it == grid_t.begin() ? 0 : static_cast<std::size_t>(it - grid_t.begin()) - 1;
  const double base_t = grid_t[k];
  const double base = grid_integral[k];
  if (std::abs(t - base_t) < 1e-12) return base;
  if (!rate) throw BoundUndefinedError("report cannot evaluate the integral off-grid");
  return base + rate->integrate(base_t, t);
}

double BoundReport::general_bound(double t, double weighted_initial_norm) const {
  return convergence.general_prefactor * weighted_initial_norm * std::exp(-integral_at(t));
}

std::optional<double> BoundReport::uniform_bound(double t) const {
  if (!convergence.uniform_coefficient) return std::nullopt;
  return *convergence.uniform_coefficient * std::exp(-integral_at(t));
}

std::optional<double> BoundReport::mean_bound(double t, std::size_t j,
                                              const WeightSequence& w) const {
  if (!convergence.mean_inv_w) return std::nullopt;
  return (convergence.d0 + w[j]) * *convergence.mean_inv_w * std::exp(-integral_at(t));
}

std::optional<double> BoundReport::claimed_mean_display(double t, std::size_t j,
                                                        const WeightSequence& w) const {
  if (!claims.r_star_star || !claims.b_star_star) return std::nullopt;
  return *claims.r_star_star * w[j] * std::exp(-*claims.b_star_star * t);
}

BoundReport compute_bound_report(const QueueModel& model, const WeightSequence& w,
                                 const BoundOptions& options) {
  if (options.grid < 2 || !(options.t_max > 0.0)) {
    throw ModelError("bound report needs t_max > 0 and at least two grid points");
  }
  BoundReport report;
  report.truncation_n = options.truncation;
  report.claims = options.claims;
  report.weight_constants = w.constants();
  report.convergence.d0 = w.d0();
  report.convergence.general_prefactor = 1.0 / report.weight_constants.d;
  if (std::isfinite(report.weight_constants.d_star)) {
    report.convergence.uniform_coefficient =
        2.0 * report.weight_constants.d_star / report.weight_constants.d;
  }
  if (report.weight_constants.w > 0.0) {
    report.convergence.mean_inv_w = 1.0 / report.weight_constants.w;
  }

  auto rate = std::make_shared<const ContractionRate>(model, w, options.truncation);
  report.rate = rate;
  report.tail_certified = rate->tail_certified();
  report.closed_form = rate->closed_form();

  const std::size_t grid = options.grid;
  report.grid_t.resize(grid);
  report.grid_beta.resize(grid);
  report.grid_integral.resize(grid);
  report.grid_argmin.resize(grid);
  report.grid_tail_binds.resize(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = options.t_max * static_cast<double>(k) / static_cast<double>(grid - 1);
    report.grid_t[k] = t;
    const BetaSample s = rate->sample(t);
    report.grid_beta[k] = s.value;
    report.grid_argmin[k] = s.argmin_column;
    report.grid_tail_binds[k] = s.tail_binds;
    report.grid_integral[k] =
        k == 0 ? 0.0
               : report.grid_integral[k - 1] +
                     rate->integrate(report.grid_t[k - 1], t, options.quad_tol);
  }

  report.period = model.period();
  if (report.period) {
    report.beta_ss_mean =
        report.closed_form
            ? report.closed_form->mean(*report.period)
            : rate->integrate(0.0, *report.period, options.quad_tol) / *report.period;
    report.mean_is_periodic = true;
  } else {
    report.beta_ss_mean = report.grid_integral.back() / options.t_max;
    report.mean_is_periodic = false;
  }

  const auto [bs_sup, bs_delta] = beta_star_sup(model, options.t_max);
  report.b_star = bs_sup;
  report.b_star_grid_delta = bs_delta;

  if (!report.period) {
    report.envelope_failure =
        "no common declared period; exponential envelope certificate unavailable";
  } else if (!(report.beta_ss_mean > 0.0)) {
    report.envelope_failure = "not exponentially ergodic: nonpositive period mean " +
                              std::to_string(report.beta_ss_mean);
  } else if (report.closed_form) {
    report.envelope = fit_envelope(*report.closed_form, *report.period);
  } else {
    report.envelope =
        fit_envelope([&](double t) { return (*rate)(t); }, *report.period, 2048);
  }
  if (report.envelope) {
    report.limiting_bound =
        limiting_regime_bound(*report.envelope, report.convergence.d0, report.b_star);
  }

  if (model.is_level_jump()) {
    const auto& b = model.b_sequence();
    report.advisory.sum_b = b.tail_sum(1);
    report.advisory.sum_k_b = b.first_moment_tail(0);
    // sum_k k B_k: for the cubic family B_k = 2/(k(k+1)), so the summand is
    // 2/(k+1) and the series diverges; explicit lists are finitely supported.
    report.advisory.sum_k_tail_finite = b.family == BSequence::Family::explicit_list;
  }

  // Claimed constants: compare against first principles and flag.
  const auto& claims = options.claims;
  if (claims.any()) {
    auto add = [&](std::string quantity, double fp, double c, bool sound, std::string note) {
      report.discrepancies.push_back(
          {std::move(quantity), fp, c, sound, std::move(note)});
    };
    if (claims.beta_ss_lambda_coefficient && model.is_level_jump()) {
      const double fp = rate->weighted_b_total() - 1.0;
      const double c = *claims.beta_ss_lambda_coefficient;
      // A larger coefficient understates the contraction rate, which is the
      // safe direction for an upper bound.
      add("beta_ss_lambda_coefficient", fp, c, c >= fp - 1e-12,
          "first principles: sum_k d_k b_k - 1 from the weighted column-0 sums");
    }
    if (claims.beta_ss_form) {
      const double horizon = report.period.value_or(options.t_max);
      const double fp_mean = report.beta_ss_mean;
      const double claim_mean = claims.beta_ss_form->mean(horizon);
      double max_overclaim = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < report.grid_t.size(); ++k) {
        max_overclaim = std::max(
            max_overclaim, (*claims.beta_ss_form)(report.grid_t[k]) - report.grid_beta[k]);
      }
      add("beta_ss_mean", fp_mean, claim_mean, max_overclaim <= 1e-9,
          "claimed rate form exceeds the first-principles rate by up to " +
              std::to_string(max_overclaim) + " on the output grid");
    }
    if (claims.b_star) {
      add("b_star", report.b_star, *claims.b_star, *claims.b_star >= report.b_star - 1e-12,
          "derived value is sup_t inf_k beta_k(t)");
    }
    if (claims.r_star_star) {
      const double fp = report.envelope ? report.envelope->r_star_star : kNan;
      const bool sound = report.envelope && *claims.r_star_star >= fp - 1e-12;
      add("r_star_star", fp, *claims.r_star_star, sound,
          report.envelope ? "derived from the first-principles rate"
                          : "no envelope exists for the first-principles rate");
    }
    if (claims.b_star_star) {
      const double fp = report.envelope ? report.envelope->b_star_star : kNan;
      const bool sound = report.envelope && *claims.b_star_star <= fp + 1e-12;
      add("b_star_star", fp, *claims.b_star_star, sound,
          report.envelope ? "derived period mean of the first-principles rate"
                          : "no envelope exists for the first-principles rate");
    }
    if (claims.limiting_bound) {
      const double fp = report.limiting_bound.value_or(kNan);
      const bool sound = report.limiting_bound && *claims.limiting_bound >= fp - 1e-12;
      add("limiting_bound", fp, *claims.limiting_bound, sound,
          report.limiting_bound ? "derived R** d0 b* / b**"
                                : "undefined without a first-principles envelope");
    }
    if (claims.r_star_star && claims.b_star_star && claims.b_star) {
      report.limiting_bound_claimed = limiting_regime_bound(
          *claims.r_star_star, report.convergence.d0, *claims.b_star, *claims.b_star_star);
    }
    if (claims.beta_ss_form && report.period) {
      try {
        report.claimed_rate_envelope = fit_envelope(*claims.beta_ss_form, *report.period);
      } catch (const BoundUndefinedError&) {
        report.claimed_rate_envelope.reset();
      }
    }
  }
  return report;
}

BoundReport asserted_constant_rate_report(double rate_value, const WeightSequence& w,
                                          const BoundOptions& options) {
  BoundReport report;
  report.truncation_n = options.truncation;
  report.tail_certified = false;  // asserted, not computed
  report.weight_constants = w.constants();
  report.convergence.d0 = w.d0();
  report.convergence.general_prefactor = 1.0 / report.weight_constants.d;
  if (std::isfinite(report.weight_constants.d_star)) {
    report.convergence.uniform_coefficient =
        2.0 * report.weight_constants.d_star / report.weight_constants.d;
  }
  if (report.weight_constants.w > 0.0) {
    report.convergence.mean_inv_w = 1.0 / report.weight_constants.w;
  }
  report.closed_form = TrigPoly(rate_value);
  report.beta_ss_mean = rate_value;
  report.mean_is_periodic = true;
  const std::size_t grid = options.grid;
  report.grid_t.resize(grid);
  report.grid_beta.assign(grid, rate_value);
  report.grid_integral.resize(grid);
  report.grid_argmin.assign(grid, 0);
  report.grid_tail_binds.assign(grid, false);
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = options.t_max * static_cast<double>(k) / static_cast<double>(grid - 1);
    report.grid_t[k] = t;
    report.grid_integral[k] = rate_value * t;
  }
  if (rate_value > 0.0) report.envelope = EnvelopeFit{1.0, rate_value, 0.0};
  report.envelope_failure = rate_value > 0.0 ? "" : "asserted rate is nonpositive";
  return report;
}

}  // namespace catbound
