#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catbound/trig_poly.hpp"

namespace catbound {

enum class TimeFunctionKind { constant, trig_poly, piecewise_constant, tabulated };

/// A nonnegative, locally integrable rate as a function of time, restricted
/// to four structured kinds so that exact integration and rigorous suprema
/// are available downstream.
///
/// Evaluation must be nonnegative. Tiny negative excursions from floating
/// point (within 1e-9 of the function scale) evaluate to zero; anything
/// beyond that is a hard model error naming the function and the time.
class TimeFunction {
 public:
  static TimeFunction constant(double value, std::optional<double> period = {});
  static TimeFunction trig(double offset, std::vector<TrigTerm> terms,
                           std::optional<double> period = {});
  /// values[i] on [breakpoints[i], breakpoints[i+1]); the last value extends
  /// to infinity, or the whole pattern repeats when a period is declared.
  static TimeFunction piecewise(std::vector<double> breakpoints, std::vector<double> values,
                                std::optional<double> period = {});
  /// Linear interpolation through (times[i], values[i]); flat beyond the last
  /// sample unless a period is declared.
  static TimeFunction tabulated(std::vector<double> times, std::vector<double> values,
                                std::optional<double> period = {});

  /// f(t), t >= 0.
  double operator()(double t) const;

  /// Exact integral over [t0, t1] (antiderivative for trig, segment sums for
  /// piecewise kinds, trapezoid-exact for tabulated data).
  double integrate(double t0, double t1) const;

  /// Rigorous sup over t >= 0 (coefficient bound for trig).
  double upper_bound() const;

  TimeFunctionKind kind() const { return kind_; }
  const std::optional<double>& period() const { return period_; }
  bool is_constant_zero() const;

  /// Closed form when the function is constant or trigonometric.
  std::optional<TrigPoly> as_trig() const;

  const std::string& name() const { return name_; }
  TimeFunction& named(std::string name) {
    name_ = std::move(name);
    return *this;
  }

  // Raw field access for serialization.
  double constant_value() const { return trig_.offset(); }
  const TrigPoly& trig_data() const { return trig_; }
  const std::vector<double>& breakpoints() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

  /// Structural equality; the diagnostic name does not participate.
  bool operator==(const TimeFunction& other) const {
    return kind_ == other.kind_ && trig_ == other.trig_ && knots_ == other.knots_ &&
           values_ == other.values_ && period_ == other.period_;
  }

 private:
  TimeFunction() = default;
  double eval_raw(double t) const;
  double wrap(double t) const;
  double integrate_base(double a, double b) const;  // over the base pattern, 0 <= a <= b
  void validate() const;

  TimeFunctionKind kind_ = TimeFunctionKind::constant;
  TrigPoly trig_;               // constant and trig kinds
  std::vector<double> knots_;   // piecewise breakpoints or tabulated times
  std::vector<double> values_;  // piecewise or tabulated values
  std::optional<double> period_;
  double scale_ = 1.0;  // for the negative-evaluation guard
  std::string name_ = "rate";
};

/// Named operation form of TimeFunction evaluation.
inline double eval_rate(const TimeFunction& f, double t) { return f(t); }

}  // namespace catbound
