#include "catbound/time_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "catbound/errors.hpp"

namespace catbound {

namespace {

constexpr double kNegativeSlack = 1e-9;
constexpr double kPeriodTol = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw ModelError(what); }

}  // namespace

TimeFunction TimeFunction::constant(double value, std::optional<double> period) {
  TimeFunction f;
  f.kind_ = TimeFunctionKind::constant;
  f.trig_ = TrigPoly(value);
  f.period_ = period;
  f.scale_ = std::max(1.0, std::abs(value));
  f.validate();
  return f;
}

TimeFunction TimeFunction::trig(double offset, std::vector<TrigTerm> terms,
                                std::optional<double> period) {
  TimeFunction f;
  f.kind_ = TimeFunctionKind::trig_poly;
  f.trig_ = TrigPoly(offset, std::move(terms));
  f.period_ = period;
  f.scale_ = std::max(1.0, std::abs(f.trig_.sup_bound()));
  f.validate();
  return f;
}

TimeFunction TimeFunction::piecewise(std::vector<double> breakpoints, std::vector<double> values,
                                     std::optional<double> period) {
  TimeFunction f;
  f.kind_ = TimeFunctionKind::piecewise_constant;
  f.knots_ = std::move(breakpoints);
  f.values_ = std::move(values);
  f.period_ = period;
  double m = 1.0;
  for (double v : f.values_) m = std::max(m, std::abs(v));
  f.scale_ = m;
  f.validate();
  return f;
}

TimeFunction TimeFunction::tabulated(std::vector<double> times, std::vector<double> values,
                                     std::optional<double> period) {
  TimeFunction f;
  f.kind_ = TimeFunctionKind::tabulated;
  f.knots_ = std::move(times);
  f.values_ = std::move(values);
  f.period_ = period;
  double m = 1.0;
  for (double v : f.values_) m = std::max(m, std::abs(v));
  f.scale_ = m;
  f.validate();
  return f;
}

void TimeFunction::validate() const {
  if (period_ && !(*period_ > 0.0 && std::isfinite(*period_))) {
    fail("time function '" + name_ + "': period must be positive and finite");
  }
  switch (kind_) {
    case TimeFunctionKind::constant:
      if (!std::isfinite(trig_.offset())) fail("time function '" + name_ + "': non-finite value");
      if (trig_.offset() < 0.0) {
        fail("time function '" + name_ + "': negative constant " +
             std::to_string(trig_.offset()));
      }
      return;
    case TimeFunctionKind::trig_poly: {
      if (!std::isfinite(trig_.sup_bound())) {
        fail("time function '" + name_ + "': non-finite coefficients");
      }
      for (const auto& term : trig_.terms()) {
        if (!(term.freq > 0.0)) {
          fail("time function '" + name_ + "': harmonic frequencies must be positive");
        }
      }
      // Declared period must be a whole number of cycles for every harmonic.
      if (period_ && !trig_.integer_periodic(*period_)) {
        fail("time function '" + name_ + "': declared period " + std::to_string(*period_) +
             " is not a period of every harmonic");
      }
      // Provably nonnegative by the coefficient bound, or nonnegative on a
      // sample grid (the evaluation guard still protects every later call).
      if (trig_.inf_bound() < -kNegativeSlack * scale_) {
        const double t_hi = period_.value_or(10.0);
        for (int i = 0; i <= 4096; ++i) {
          const double t = t_hi * i / 4096.0;
          if (trig_(t) < -kNegativeSlack * scale_) {
            fail("time function '" + name_ + "': negative value " + std::to_string(trig_(t)) +
                 " at t = " + std::to_string(t));
          }
        }
      }
      return;
    }
    case TimeFunctionKind::piecewise_constant:
    case TimeFunctionKind::tabulated: {
      if (knots_.empty() || knots_.size() != values_.size()) {
        fail("time function '" + name_ + "': breakpoint and value lists must match and be "
             "nonempty");
      }
      if (knots_.front() != 0.0) fail("time function '" + name_ + "': grid must start at 0");
      if (!std::is_sorted(knots_.begin(), knots_.end()) ||
          std::adjacent_find(knots_.begin(), knots_.end()) != knots_.end()) {
        fail("time function '" + name_ + "': grid must be strictly increasing");
      }
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
          fail("time function '" + name_ + "': negative or non-finite value at grid index " +
               std::to_string(i));
        }
      }
      if (period_ && knots_.back() > *period_ + kPeriodTol) {
        fail("time function '" + name_ + "': grid extends beyond the declared period");
      }
      return;
    }
  }
}

double TimeFunction::wrap(double t) const {
  if (!period_) return t;
  const double p = *period_;
  double r = std::fmod(t, p);
  if (r < 0.0) r += p;
  return r;
}

double TimeFunction::eval_raw(double t) const {
  switch (kind_) {
    case TimeFunctionKind::constant:
      return trig_.offset();
    case TimeFunctionKind::trig_poly:
      return trig_(t);
    case TimeFunctionKind::piecewise_constant: {
      const double x = wrap(t);
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      const std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
      return values_[idx == 0 ? 0 : idx - 1];
    }
    case TimeFunctionKind::tabulated: {
      const double x = wrap(t);
      if (x <= knots_.front()) return values_.front();
      if (x >= knots_.back()) return values_.back();
      auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
      const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
      const std::size_t lo = hi - 1;
      const double u = (x - knots_[lo]) / (knots_[hi] - knots_[lo]);
      return values_[lo] + u * (values_[hi] - values_[lo]);
    }
  }
  return 0.0;
}

double TimeFunction::operator()(double t) const {
  if (t < 0.0) fail("time function '" + name_ + "': evaluation at negative time");
  const double v = eval_raw(t);
  if (!std::isfinite(v)) {
    fail("time function '" + name_ + "': non-finite value at t = " + std::to_string(t));
  }
  if (v < 0.0) {
    if (v >= -kNegativeSlack * scale_) return 0.0;
    std::ostringstream os;
    os << "time function '" << name_ << "': negative rate " << v << " at t = " << t;
    fail(os.str());
  }
  return v;
}

double TimeFunction::integrate_base(double a, double b) const {
  // Integral over [a, b] of the base pattern (no period wrapping).
  switch (kind_) {
    case TimeFunctionKind::constant:
      return trig_.offset() * (b - a);
    case TimeFunctionKind::trig_poly:
      return trig_.integrate(a, b);
    case TimeFunctionKind::piecewise_constant: {
      double total = 0.0;
      for (std::size_t i = 0; i < knots_.size(); ++i) {
        const double seg_lo = knots_[i];
        const double seg_hi = i + 1 < knots_.size()
                                  ? knots_[i + 1]
                                  : std::max(b, seg_lo);  // last piece extends
        const double lo = std::max(a, seg_lo);
        const double hi = std::min(b, seg_hi);
        if (hi > lo) total += values_[i] * (hi - lo);
      }
      return total;
    }
    case TimeFunctionKind::tabulated: {
      double total = 0.0;
      // Flat before the first and after the last sample.
      if (a < knots_.front()) total += values_.front() * (std::min(b, knots_.front()) - a);
      if (b > knots_.back()) total += values_.back() * (b - std::max(a, knots_.back()));
      for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        const double lo = std::max(a, knots_[i]);
        const double hi = std::min(b, knots_[i + 1]);
        if (hi <= lo) continue;
        const double width = knots_[i + 1] - knots_[i];
        const double slope = (values_[i + 1] - values_[i]) / width;
        auto value_at = [&](double x) { return values_[i] + slope * (x - knots_[i]); };
        total += 0.5 * (value_at(lo) + value_at(hi)) * (hi - lo);
      }
      return total;
    }
  }
  return 0.0;
}

double TimeFunction::integrate(double t0, double t1) const {
  if (t1 < t0) return -integrate(t1, t0);
  if (kind_ == TimeFunctionKind::constant || kind_ == TimeFunctionKind::trig_poly || !period_) {
    return integrate_base(t0, t1);
  }
  // Periodic piecewise data: whole periods plus partial pieces.
  const double p = *period_;
  const double full = integrate_base(0.0, p);
  const double k0 = std::floor(t0 / p);
  const double k1 = std::floor(t1 / p);
  if (k0 == k1) return integrate_base(t0 - k0 * p, t1 - k0 * p);
  double total = integrate_base(t0 - k0 * p, p) + integrate_base(0.0, t1 - k1 * p);
  total += full * (k1 - k0 - 1.0);
  return total;
}

double TimeFunction::upper_bound() const {
  switch (kind_) {
    case TimeFunctionKind::constant:
      return trig_.offset();
    case TimeFunctionKind::trig_poly:
      return trig_.sup_bound();
    case TimeFunctionKind::piecewise_constant:
    case TimeFunctionKind::tabulated:
      return *std::max_element(values_.begin(), values_.end());
  }
  return 0.0;
}

bool TimeFunction::is_constant_zero() const {
  return kind_ == TimeFunctionKind::constant && trig_.offset() == 0.0;
}

std::optional<TrigPoly> TimeFunction::as_trig() const {
  if (kind_ == TimeFunctionKind::constant || kind_ == TimeFunctionKind::trig_poly) return trig_;
  return std::nullopt;
}

}  // namespace catbound
