#include "catbound/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "catbound/errors.hpp"

namespace catbound {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

WeightSequence WeightSequence::constant_one() {
  WeightSequence w;
  w.kind_ = WeightKind::constant_one;
  return w;
}

WeightSequence WeightSequence::linear() {
  WeightSequence w;
  w.kind_ = WeightKind::linear;
  return w;
}

WeightSequence WeightSequence::geometric(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) {
    throw ModelError("geometric weights require rho > 1");
  }
  WeightSequence w;
  w.kind_ = WeightKind::geometric;
  w.rho_ = rho;
  return w;
}

WeightSequence WeightSequence::explicit_tail(std::vector<double> prefix, WeightTail tail) {
  if (prefix.empty()) throw ModelError("explicit weights need at least one prefix value");
  for (double v : prefix) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ModelError("invalid weights: every d_k must be positive and finite");
    }
  }
  if (tail.kind == WeightTailKind::constant) tail.slope = 0.0;
  if (tail.slope < 0.0) {
    throw ModelError("invalid weights: a linear tail with negative slope eventually "
                     "violates d_k > 0");
  }
  WeightSequence w;
  w.kind_ = WeightKind::explicit_tail;
  w.prefix_ = std::move(prefix);
  w.tail_ = tail;
  return w;
}

double WeightSequence::operator[](std::size_t k) const {
  switch (kind_) {
    case WeightKind::constant_one:
      return 1.0;
    case WeightKind::linear:
      return k == 0 ? 1.0 : static_cast<double>(k) + 1.0;
    case WeightKind::geometric:
      return std::pow(rho_, static_cast<double>(k));
    case WeightKind::explicit_tail: {
      if (k < prefix_.size()) return prefix_[k];
      const double last = prefix_.back();
      const double steps = static_cast<double>(k - (prefix_.size() - 1));
      return last + tail_.slope * steps;
    }
  }
  return 1.0;
}

WeightConstants WeightSequence::constants() const {
  switch (kind_) {
    case WeightKind::constant_one:
      // d_i / i -> 0, so the mean-bound constant W vanishes.
      return {1.0, 1.0, 0.0};
    case WeightKind::linear:
      // inf of (i+1)/i over i >= 1 is the limit 1.
      return {1.0, kInf, 1.0};
    case WeightKind::geometric: {
      // rho^i / i decreases until i ~ 1/(rho-1), then grows without bound.
      double w = kInf;
      const std::size_t scan = static_cast<std::size_t>(1.0 / (rho_ - 1.0)) + 3;
      for (std::size_t i = 1; i <= scan; ++i) {
        w = std::min(w, std::pow(rho_, static_cast<double>(i)) / static_cast<double>(i));
      }
      return {1.0, kInf, w};
    }
    case WeightKind::explicit_tail: {
      double d = kInf, d_star = 0.0, w = kInf;
      for (std::size_t i = 0; i < prefix_.size(); ++i) {
        d = std::min(d, prefix_[i]);
        d_star = std::max(d_star, prefix_[i]);
        if (i >= 1) w = std::min(w, prefix_[i] / static_cast<double>(i));
      }
      const double last = prefix_.back();
      if (tail_.slope == 0.0) {
        // d_k = last beyond the prefix: d_k / k -> 0.
        d = std::min(d, last);
        d_star = std::max(d_star, last);
        w = 0.0;
      } else {
        // d_k = last + slope * (k - m) is increasing; d_k / k is monotone
        // with limit slope, so the infimum sits at the first tail index or
        // in the limit.
        const std::size_t first = prefix_.size();
        const double first_value = last + tail_.slope;
        d = std::min(d, std::min(last, first_value));
        d_star = kInf;
        if (first >= 1) w = std::min(w, first_value / static_cast<double>(first));
        w = std::min(w, tail_.slope);
      }
      if (!(d > 0.0)) throw ModelError("invalid weights: inf d_k = 0");
      return {d, d_star, w};
    }
  }
  return {1.0, 1.0, 0.0};
}

double WeightSequence::tail_inf_from(std::size_t n) const {
  switch (kind_) {
    case WeightKind::constant_one:
      return 1.0;
    case WeightKind::linear:
      return static_cast<double>(n) + 2.0;
    case WeightKind::geometric:
      return std::pow(rho_, static_cast<double>(n) + 1.0);
    case WeightKind::explicit_tail: {
      double d = kInf;
      for (std::size_t k = n + 1; k < prefix_.size(); ++k) d = std::min(d, prefix_[k]);
      const std::size_t first_tail = std::max(n + 1, prefix_.size());
      d = std::min(d, (*this)[first_tail]);  // tail is monotone nondecreasing
      return d;
    }
  }
  return 1.0;
}

double WeightSequence::tail_ratio_sup_from(std::size_t n) const {
  switch (kind_) {
    case WeightKind::constant_one:
    case WeightKind::linear:
    case WeightKind::geometric:
      return 1.0;  // nondecreasing families: d_{k-1}/d_k <= 1
    case WeightKind::explicit_tail: {
      double sup = 0.0;
      const std::size_t last_prefix_pair = prefix_.size();  // ratio uses k-1 in prefix
      for (std::size_t k = n + 1; k <= last_prefix_pair + 1; ++k) {
        sup = std::max(sup, (*this)[k - 1] / (*this)[k]);
      }
      return std::max(sup, 1.0);  // tail itself is nondecreasing
    }
  }
  return 1.0;
}

WeightConstants weight_constants(const WeightSequence& w, std::size_t n) {
  (void)n;  // named families and tail rules make the constants exact
  return w.constants();
}

}  // namespace catbound
