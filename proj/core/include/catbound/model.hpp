#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "catbound/time_function.hpp"

namespace catbound {

enum class CatastropheTailKind { zero, constant_in_k, power };

/// Per-state catastrophe rates beta_k(t), k >= 1, as an explicit prefix plus
/// a declared tail rule so the infimum over all states is exact:
///   zero:          beta_k(t) = 0 beyond the prefix
///   constant_in_k: beta_k(t) = rate(t) beyond the prefix
///   power:         beta_k(t) = base(t) + coef(t) / k^power beyond the prefix
/// The power tail is nonincreasing in k (coef is a nonnegative rate), so its
/// infimum is the limit base(t).
struct CatastropheSpec {
  std::vector<TimeFunction> prefix;   // beta_1 .. beta_m overrides
  CatastropheTailKind tail = CatastropheTailKind::zero;
  std::optional<TimeFunction> rate;   // constant_in_k
  std::optional<TimeFunction> base;   // power
  std::optional<TimeFunction> coef;   // power
  double power = 1.0;

  static CatastropheSpec none();
  static CatastropheSpec uniform(TimeFunction rate_fn);
  static CatastropheSpec power_tail(TimeFunction base_fn, TimeFunction coef_fn, double p,
                                    std::vector<TimeFunction> prefix_fns = {});

  double value(std::size_t k, double t) const;  // beta_k(t), k >= 1
  /// inf over all k >= 1 (state 0 has no catastrophe transition).
  double infimum(double t) const;
  /// Closed form of the infimum, when available (empty prefix, trig tail).
  std::optional<TrigPoly> infimum_trig() const;
  /// Rigorous sup over t of beta_k(t).
  double upper_bound_at(std::size_t k) const;
  /// Rigorous sup over t and over k > n.
  double upper_bound_beyond(std::size_t n) const;
  bool is_zero() const { return tail == CatastropheTailKind::zero && prefix.empty(); }

  void validate() const;
  bool operator==(const CatastropheSpec&) const = default;
};

/// Level-jump arrival targets: jump from state j to state i > j occurs at
/// rate lambda(t) * b_i.
struct BSequence {
  enum class Family { cubic_telescoping, explicit_list };
  Family family = Family::cubic_telescoping;
  std::vector<double> values;  // explicit_list only

  static BSequence cubic_telescoping();
  static BSequence explicit_list(std::vector<double> values);

  double at(std::size_t k) const;  // b_k, k >= 1 (0 beyond an explicit list)
  /// B_k = sum_{i >= k} b_i, exact (telescoping closed form or suffix sums).
  double tail_sum(std::size_t k) const;
  // sum_{i > j} i * b_i, exact.
  double first_moment_tail(std::size_t j) const;
  std::size_t explicit_size() const { return values.size(); }

  void validate() const;
  bool operator==(const BSequence&) const = default;
};

/// One entry of a general rate map: a batch of size `jump` arriving to (or
/// being served from) state `from`.
struct RateEntry {
  std::size_t from = 0;
  std::size_t jump = 1;
  TimeFunction rate = TimeFunction::constant(0.0);

  bool operator==(const RateEntry&) const = default;
};

enum class ModelFamily { level_jump, general };

/// Full intensity specification of the queue-length process: time-varying
/// batch arrivals, batch services, and state-dependent catastrophe rates.
class QueueModel {
 public:
  /// Level-jump arrivals with base rate lambda(t) and target weights b_i,
  /// single-server service at rate mu(t).
  static QueueModel level_jump(TimeFunction lambda, TimeFunction mu, CatastropheSpec cats,
                               BSequence b);
  static QueueModel general(std::vector<RateEntry> arrivals, std::vector<RateEntry> services,
                            CatastropheSpec cats);

  /// The built-in example family: lambda(t) = 2 + 2 cos 2 pi t,
  /// gamma_k(t) = 2 + (1 + sin 2 pi t)/k, b_k = 4/(k(k+1)(k+2)), mu as given
  /// (default: constant 1, a valid 1-periodic choice).
  static QueueModel example_paper(std::optional<TimeFunction> mu = {});
  /// Same family with lambda scaled by 1/4, which makes the first-principles
  /// contraction rate 1 - cos 2 pi t (positive mean).
  static QueueModel example_corrected(std::optional<TimeFunction> mu = {});

  ModelFamily family() const { return family_; }
  bool is_level_jump() const { return family_ == ModelFamily::level_jump; }

  // Level-jump accessors.
  const TimeFunction& lambda() const;
  const TimeFunction& mu() const;
  const BSequence& b_sequence() const;
  double b(std::size_t k) const;

  // General-map accessors.
  const std::vector<RateEntry>& arrivals() const { return arrivals_; }
  const std::vector<RateEntry>& services() const { return services_; }

  const CatastropheSpec& catastrophes() const { return catastrophes_; }

  /// beta_k(t), k >= 1.
  double beta_k(std::size_t k, double t) const { return catastrophes_.value(k, t); }

  /// Total arrival rate out of state `from` (untruncated).
  double arrival_outflow(std::size_t from, double t) const;
  /// Total service rate out of state `from`.
  double service_outflow(std::size_t from, double t) const;
  /// |q_jj(t)| = total outflow of state j in the full (untruncated) model.
  double total_outflow(std::size_t j, double t) const;

  /// Common period of every rate in the model, when one exists.
  std::optional<double> period() const;

  bool operator==(const QueueModel&) const = default;

 private:
  QueueModel() = default;

  ModelFamily family_ = ModelFamily::level_jump;
  TimeFunction lambda_ = TimeFunction::constant(0.0);
  TimeFunction mu_ = TimeFunction::constant(0.0);
  BSequence b_;
  std::vector<RateEntry> arrivals_;
  std::vector<RateEntry> services_;
  CatastropheSpec catastrophes_;
};

// Named operations.

/// B_k for the level-jump family (exact). Throws ModelError for other
/// families.
double b_partial_tail(const QueueModel& model, std::size_t k);

/// beta*(t) = inf_{k >= 1} beta_k(t), exact via the declared tail rule.
double beta_star(const QueueModel& model, double t);

/// L_N(t) = max_{j <= n} |q_jj(t)|.
double l_n(const QueueModel& model, std::size_t n, double t);

}  // namespace catbound
