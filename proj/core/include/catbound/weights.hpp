#pragma once

#include <cstddef>
#include <vector>

namespace catbound {

enum class WeightKind { constant_one, linear, geometric, explicit_tail };
enum class WeightTailKind { constant, linear };

/// Tail rule for explicit weight sequences: beyond the stored prefix of
/// length m, d_k = prefix.back() + slope * (k - (m-1)) (slope = 0 for the
/// constant tail).
struct WeightTail {
  WeightTailKind kind = WeightTailKind::constant;
  double slope = 0.0;

  bool operator==(const WeightTail&) const = default;
};

/// Exact derived constants of a weight sequence. d_star may be +infinity.
struct WeightConstants {
  double d;       // inf_k d_k
  double d_star;  // sup_k d_k
  double w;       // inf_{i>=1} d_i / i
};

/// Positive weights {d_k, k >= 0} with a machine-checkable tail so that
/// infima and suprema over the whole sequence are exact.
class WeightSequence {
 public:
  static WeightSequence constant_one();
  /// d_0 = 1, d_k = k + 1 for k >= 1.
  static WeightSequence linear();
  /// d_k = rho^k, rho > 1.
  static WeightSequence geometric(double rho);
  static WeightSequence explicit_tail(std::vector<double> prefix, WeightTail tail);

  double operator[](std::size_t k) const;
  double d0() const { return (*this)[0]; }
  WeightConstants constants() const;

  WeightKind kind() const { return kind_; }
  double rho() const { return rho_; }
  const std::vector<double>& prefix() const { return prefix_; }
  const WeightTail& tail() const { return tail_; }

  /// inf over k > n of d_k.
  double tail_inf_from(std::size_t n) const;
  /// sup over k > n of d_{k-1}/d_k.
  double tail_ratio_sup_from(std::size_t n) const;

  bool operator==(const WeightSequence&) const = default;

 private:
  WeightSequence() = default;

  WeightKind kind_ = WeightKind::constant_one;
  double rho_ = 1.0;
  std::vector<double> prefix_;
  WeightTail tail_;
};

/// Exact (d, d*, W). For named families the truncation argument is unused;
/// explicit sequences scan max(n, prefix length) and apply the tail rule.
WeightConstants weight_constants(const WeightSequence& w, std::size_t n);

}  // namespace catbound
