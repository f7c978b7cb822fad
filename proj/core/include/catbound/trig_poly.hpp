#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace catbound {

/// One harmonic: cos_coef * cos(2*pi*freq*t) + sin_coef * sin(2*pi*freq*t).
struct TrigTerm {
  double freq = 0.0;
  double cos_coef = 0.0;
  double sin_coef = 0.0;

  bool operator==(const TrigTerm&) const = default;
};

/// Trigonometric polynomial a0 + sum of harmonics. Unlike TimeFunction this
/// carries no sign constraint; it represents rate combinations that may be
/// negative (contraction rates, envelope integrands).
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(double offset, std::vector<TrigTerm> terms = {})
      : offset_(offset), terms_(std::move(terms)) {}

  double operator()(double t) const {
    double v = offset_;
    for (const auto& term : terms_) {
      const double arg = 2.0 * std::numbers::pi * term.freq * t;
      v += term.cos_coef * std::cos(arg) + term.sin_coef * std::sin(arg);
    }
    return v;
  }

  /// F(t) with F(0) = 0.
  double antiderivative(double t) const {
    double v = offset_ * t;
    for (const auto& term : terms_) {
      const double w = 2.0 * std::numbers::pi * term.freq;
      if (w == 0.0) {
        v += term.cos_coef * t;  // degenerate cos(0) term
        continue;
      }
      const double arg = w * t;
      v += term.cos_coef * std::sin(arg) / w +
           term.sin_coef * (1.0 - std::cos(arg)) / w;
    }
    return v;
  }

  double integrate(double t0, double t1) const {
    return antiderivative(t1) - antiderivative(t0);
  }

  /// True when every harmonic completes an integer number of cycles over
  /// `period`, so the mean over a period is exactly the offset.
  bool integer_periodic(double period) const {
    for (const auto& term : terms_) {
      const double cycles = term.freq * period;
      if (std::abs(cycles - std::round(cycles)) > 1e-12 * (1.0 + std::abs(cycles))) {
        return false;
      }
    }
    return true;
  }

  double mean(double period) const {
    if (integer_periodic(period)) return offset_;
    return integrate(0.0, period) / period;
  }

  /// d/dt at t.
  double derivative(double t) const {
    double v = 0.0;
    for (const auto& term : terms_) {
      const double w = 2.0 * std::numbers::pi * term.freq;
      const double arg = w * t;
      v += -term.cos_coef * w * std::sin(arg) + term.sin_coef * w * std::cos(arg);
    }
    return v;
  }

  double sup_bound() const {
    double v = offset_;
    for (const auto& term : terms_) v += std::hypot(term.cos_coef, term.sin_coef);
    return v;
  }

  double inf_bound() const {
    double v = offset_;
    for (const auto& term : terms_) v -= std::hypot(term.cos_coef, term.sin_coef);
    return v;
  }

  /// *this += factor * other, merging harmonics with identical frequency.
  TrigPoly& add_scaled(const TrigPoly& other, double factor) {
    offset_ += factor * other.offset_;
    for (const auto& term : other.terms_) {
      bool merged = false;
      for (auto& mine : terms_) {
        if (mine.freq == term.freq) {
          mine.cos_coef += factor * term.cos_coef;
          mine.sin_coef += factor * term.sin_coef;
          merged = true;
          break;
        }
      }
      if (!merged) {
        terms_.push_back({term.freq, factor * term.cos_coef, factor * term.sin_coef});
      }
    }
    return *this;
  }

  TrigPoly scaled(double factor) const {
    TrigPoly out(0.0);
    out.add_scaled(*this, factor);
    return out;
  }

  double offset() const { return offset_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

  bool operator==(const TrigPoly&) const = default;

 private:
  double offset_ = 0.0;
  std::vector<TrigTerm> terms_;
};

}  // namespace catbound
