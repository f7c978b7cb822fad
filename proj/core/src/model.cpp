#include "catbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "catbound/errors.hpp"

namespace catbound {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// CatastropheSpec

CatastropheSpec CatastropheSpec::none() {
  CatastropheSpec c;
  c.tail = CatastropheTailKind::zero;
  return c;
}

CatastropheSpec CatastropheSpec::uniform(TimeFunction rate_fn) {
  CatastropheSpec c;
  c.tail = CatastropheTailKind::constant_in_k;
  c.rate = std::move(rate_fn);
  c.validate();
  return c;
}

CatastropheSpec CatastropheSpec::power_tail(TimeFunction base_fn, TimeFunction coef_fn, double p,
                                            std::vector<TimeFunction> prefix_fns) {
  CatastropheSpec c;
  c.tail = CatastropheTailKind::power;
  c.base = std::move(base_fn);
  c.coef = std::move(coef_fn);
  c.power = p;
  c.prefix = std::move(prefix_fns);
  c.validate();
  return c;
}

void CatastropheSpec::validate() const {
  switch (tail) {
    case CatastropheTailKind::zero:
      break;
    case CatastropheTailKind::constant_in_k:
      if (!rate) throw ModelError("catastrophe tail rule 'constant_in_k' needs a rate");
      break;
    case CatastropheTailKind::power:
      if (!base || !coef) throw ModelError("catastrophe tail rule 'power' needs base and coef");
      if (!(power > 0.0)) {
        throw ModelError("catastrophe power tail needs a positive exponent so the tail is "
                         "monotone and its infimum exact");
      }
      break;
  }
}

double CatastropheSpec::value(std::size_t k, double t) const {
  if (k == 0) throw ModelError("catastrophe rates are defined for states k >= 1");
  if (k <= prefix.size()) return prefix[k - 1](t);
  switch (tail) {
    case CatastropheTailKind::zero:
      return 0.0;
    case CatastropheTailKind::constant_in_k:
      return (*rate)(t);
    case CatastropheTailKind::power:
      return (*base)(t) + (*coef)(t) / std::pow(static_cast<double>(k), power);
  }
  return 0.0;
}

double CatastropheSpec::infimum(double t) const {
  // The tail is monotone nonincreasing toward its limit (coef is a
  // nonnegative rate), so the infimum over the infinite index set is the
  // minimum of the prefix values and the tail limit.
  double inf;
  switch (tail) {
    case CatastropheTailKind::zero:
      inf = 0.0;
      break;
    case CatastropheTailKind::constant_in_k:
      inf = (*rate)(t);
      break;
    case CatastropheTailKind::power:
      inf = (*base)(t);
      break;
  }
  for (const auto& f : prefix) inf = std::min(inf, f(t));
  return inf;
}

std::optional<TrigPoly> CatastropheSpec::infimum_trig() const {
  if (!prefix.empty()) return std::nullopt;  // a min of curves is not a trig poly
  switch (tail) {
    case CatastropheTailKind::zero:
      return TrigPoly(0.0);
    case CatastropheTailKind::constant_in_k:
      return rate->as_trig();
    case CatastropheTailKind::power:
      return base->as_trig();
  }
  return std::nullopt;
}

double CatastropheSpec::upper_bound_at(std::size_t k) const {
  if (k == 0) return 0.0;
  if (k <= prefix.size()) return prefix[k - 1].upper_bound();
  switch (tail) {
    case CatastropheTailKind::zero:
      return 0.0;
    case CatastropheTailKind::constant_in_k:
      return rate->upper_bound();
    case CatastropheTailKind::power:
      return base->upper_bound() +
             coef->upper_bound() / std::pow(static_cast<double>(k), power);
  }
  return 0.0;
}

double CatastropheSpec::upper_bound_beyond(std::size_t n) const {
  double ub = 0.0;
  for (std::size_t k = n + 1; k <= prefix.size(); ++k) ub = std::max(ub, upper_bound_at(k));
  const std::size_t first_tail = std::max<std::size_t>(n + 1, prefix.size() + 1);
  // The tail is nonincreasing in k, so its first index dominates.
  ub = std::max(ub, upper_bound_at(first_tail));
  return ub;
}

// ---------------------------------------------------------------------------
// BSequence

BSequence BSequence::cubic_telescoping() {
  BSequence b;
  b.family = Family::cubic_telescoping;
  return b;
}

BSequence BSequence::explicit_list(std::vector<double> values) {
  BSequence b;
  b.family = Family::explicit_list;
  b.values = std::move(values);
  b.validate();
  return b;
}

void BSequence::validate() const {
  if (family == Family::explicit_list) {
    for (double v : values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ModelError("arrival target weights b_k must be nonnegative and finite");
      }
    }
  }
}

double BSequence::at(std::size_t k) const {
  if (k == 0) throw ModelError("b_k is defined for k >= 1");
  if (family == Family::cubic_telescoping) {
    const double kd = static_cast<double>(k);
    return 4.0 / (kd * (kd + 1.0) * (kd + 2.0));
  }
  return k <= values.size() ? values[k - 1] : 0.0;
}

double BSequence::tail_sum(std::size_t k) const {
  if (k == 0) throw ModelError("B_k is defined for k >= 1");
  if (family == Family::cubic_telescoping) {
    const double kd = static_cast<double>(k);
    return 2.0 / (kd * (kd + 1.0));
  }
  double total = 0.0;
  for (std::size_t i = values.size(); i >= k && i >= 1; --i) total += values[i - 1];
  return total;
}

double BSequence::first_moment_tail(std::size_t j) const {
  if (family == Family::cubic_telescoping) {
    // i * b_i = 4 / ((i+1)(i+2)) telescopes to 4/(j+2).
    return 4.0 / (static_cast<double>(j) + 2.0);
  }
  double total = 0.0;
  for (std::size_t i = values.size(); i > j && i >= 1; --i) {
    total += static_cast<double>(i) * values[i - 1];
  }
  return total;
}

// ---------------------------------------------------------------------------
// QueueModel

QueueModel QueueModel::level_jump(TimeFunction lambda, TimeFunction mu, CatastropheSpec cats,
                                  BSequence b) {
  cats.validate();
  b.validate();
  QueueModel m;
  m.family_ = ModelFamily::level_jump;
  m.lambda_ = std::move(lambda);
  m.mu_ = std::move(mu);
  m.catastrophes_ = std::move(cats);
  m.b_ = std::move(b);
  return m;
}

QueueModel QueueModel::general(std::vector<RateEntry> arrivals, std::vector<RateEntry> services,
                               CatastropheSpec cats) {
  cats.validate();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : arrivals) {
    if (e.jump == 0) throw ModelError("arrival entries need jump >= 1");
    if (!seen.insert({e.from, e.jump}).second) {
      throw ModelError("duplicate arrival entry (from=" + std::to_string(e.from) +
                       ", jump=" + std::to_string(e.jump) + ")");
    }
  }
  seen.clear();
  for (const auto& e : services) {
    if (e.jump == 0 || e.jump > e.from) {
      throw ModelError("service entries need 1 <= jump <= from");
    }
    if (!seen.insert({e.from, e.jump}).second) {
      throw ModelError("duplicate service entry (from=" + std::to_string(e.from) +
                       ", jump=" + std::to_string(e.jump) + ")");
    }
  }
  QueueModel m;
  m.family_ = ModelFamily::general;
  m.arrivals_ = std::move(arrivals);
  m.services_ = std::move(services);
  m.catastrophes_ = std::move(cats);
  return m;
}

QueueModel QueueModel::example_paper(std::optional<TimeFunction> mu) {
  auto lambda = TimeFunction::trig(2.0, {{1.0, 2.0, 0.0}}, 1.0).named("lambda");
  auto mu_fn = mu.value_or(TimeFunction::constant(1.0, 1.0).named("mu"));
  auto cats = CatastropheSpec::power_tail(TimeFunction::constant(2.0, 1.0).named("gamma.base"),
                                          TimeFunction::trig(1.0, {{1.0, 0.0, 1.0}}, 1.0)
                                              .named("gamma.coef"),
                                          1.0);
  return level_jump(std::move(lambda), std::move(mu_fn), std::move(cats),
                    BSequence::cubic_telescoping());
}

QueueModel QueueModel::example_corrected(std::optional<TimeFunction> mu) {
  auto lambda = TimeFunction::trig(0.5, {{1.0, 0.5, 0.0}}, 1.0).named("lambda");
  auto mu_fn = mu.value_or(TimeFunction::constant(1.0, 1.0).named("mu"));
  auto cats = CatastropheSpec::power_tail(TimeFunction::constant(2.0, 1.0).named("gamma.base"),
                                          TimeFunction::trig(1.0, {{1.0, 0.0, 1.0}}, 1.0)
                                              .named("gamma.coef"),
                                          1.0);
  return level_jump(std::move(lambda), std::move(mu_fn), std::move(cats),
                    BSequence::cubic_telescoping());
}

const TimeFunction& QueueModel::lambda() const {
  if (!is_level_jump()) throw ModelError("lambda() requires the level-jump family");
  return lambda_;
}

const TimeFunction& QueueModel::mu() const {
  if (!is_level_jump()) throw ModelError("mu() requires the level-jump family");
  return mu_;
}

const BSequence& QueueModel::b_sequence() const {
  if (!is_level_jump()) throw ModelError("b sequence requires the level-jump family");
  return b_;
}

double QueueModel::b(std::size_t k) const { return b_sequence().at(k); }

double QueueModel::arrival_outflow(std::size_t from, double t) const {
  if (is_level_jump()) return lambda_(t) * b_.tail_sum(from + 1);
  double total = 0.0;
  for (const auto& e : arrivals_) {
    if (e.from == from) total += e.rate(t);
  }
  return total;
}

double QueueModel::service_outflow(std::size_t from, double t) const {
  if (is_level_jump()) return from >= 1 ? mu_(t) : 0.0;
  double total = 0.0;
  for (const auto& e : services_) {
    if (e.from == from) total += e.rate(t);
  }
  return total;
}

double QueueModel::total_outflow(std::size_t j, double t) const {
  double total = arrival_outflow(j, t) + service_outflow(j, t);
  if (j >= 1) total += catastrophes_.value(j, t);
  return total;
}

std::optional<double> QueueModel::period() const {
  std::vector<const TimeFunction*> fns;
  if (is_level_jump()) {
    fns.push_back(&lambda_);
    fns.push_back(&mu_);
  } else {
    for (const auto& e : arrivals_) fns.push_back(&e.rate);
    for (const auto& e : services_) fns.push_back(&e.rate);
  }
  for (const auto& f : catastrophes_.prefix) fns.push_back(&f);
  if (catastrophes_.rate) fns.push_back(&*catastrophes_.rate);
  if (catastrophes_.base) fns.push_back(&*catastrophes_.base);
  if (catastrophes_.coef) fns.push_back(&*catastrophes_.coef);

  double p = 0.0;
  for (const auto* f : fns) {
    if (f->kind() == TimeFunctionKind::constant) continue;  // any period works
    if (!f->period()) return std::nullopt;
    p = std::max(p, *f->period());
  }
  if (p == 0.0) return std::nullopt;  // all constant: no distinguished period
  for (const auto* f : fns) {
    if (f->kind() == TimeFunctionKind::constant || !f->period()) continue;
    const double ratio = p / *f->period();
    if (std::abs(ratio - std::round(ratio)) > 1e-9) return std::nullopt;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Named operations

double b_partial_tail(const QueueModel& model, std::size_t k) {
  if (!model.is_level_jump()) {
    throw ModelError("B_k is only defined for the level-jump arrival family");
  }
  if (k == 0) throw ModelError("B_k is defined for k >= 1");
  return model.b_sequence().tail_sum(k);
}

double beta_star(const QueueModel& model, double t) {
  return model.catastrophes().infimum(t);
}

double l_n(const QueueModel& model, std::size_t n, double t) {
  double m = 0.0;
  for (std::size_t j = 0; j <= n; ++j) m = std::max(m, model.total_outflow(j, t));
  if (!std::isfinite(m)) throw ModelError("L_N(t) is not finite");
  return m;
}

}  // namespace catbound
