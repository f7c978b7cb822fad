#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catbound/model.hpp"
#include "catbound/weights.hpp"

namespace catbound {

/// How transitions to states above the truncation level are handled.
///   reflecting:      dropped, and the diagonal shrinks so columns stay
///                    stochastic (used by the ODE solver; conserves mass).
///   defect_tracking: the true diagonal is kept; the missing outflow shows
///                    up as a negative column-sum defect (used by the bounds
///                    code, which must never inflate contraction rates).
enum class Closure { reflecting, defect_tracking };

enum class GeneratorVariant { a, a_star, a_star_weighted };

/// g(t) = (beta*(t), 0, 0, ...) truncated to the generator dimension.
struct ForcingVector {
  std::size_t dimension = 0;
  double beta_star = 0.0;

  void add_to(std::span<double> v) const { v[0] += beta_star; }
};

/// Sparse column-oriented snapshot of A(t), A*(t) or D A*(t) D^{-1} at a
/// fixed time. Entry (i, j), i != j, is the instantaneous flow rate from
/// state j into state i; the diagonal is the negated outflow of state j
/// (per the closure).
class TruncatedGenerator {
 public:
  struct Entry {
    std::uint32_t row;
    double value;
  };

  TruncatedGenerator(std::size_t n, Closure closure, GeneratorVariant variant);

  std::size_t n() const { return n_; }
  std::size_t dimension() const { return n_ + 1; }
  double time() const { return time_; }
  Closure closure() const { return closure_; }
  GeneratorVariant variant() const { return variant_; }

  double diagonal(std::size_t j) const { return diag_[j]; }
  std::span<const Entry> column(std::size_t j) const {
    return {entries_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }
  double entry(std::size_t i, std::size_t j) const;
  double off_diagonal_column_sum(std::size_t j) const;
  double column_sum(std::size_t j) const;
  std::size_t stored_entries() const { return entries_.size() + dimension(); }

  /// out = M * x.
  void apply(std::span<const double> x, std::span<double> out) const;

  /// Dense row-major copy, (n+1) x (n+1). Intended for small n.
  std::vector<std::vector<double>> dense() const;

  /// Coordinate-list text: lines "i j value" sorted by (j, i), 17 significant
  /// digits, diagonal included.
  std::string coordinate_dump() const;

 private:
  friend class GeneratorAssembler;
  friend TruncatedGenerator apply_weights(const TruncatedGenerator&, const WeightSequence&);

  std::size_t n_;
  double time_ = 0.0;
  Closure closure_;
  GeneratorVariant variant_;
  std::vector<double> diag_;
  std::vector<std::size_t> col_ptr_;  // size dimension()+1
  std::vector<Entry> entries_;        // rows ascending within a column
};

/// Builds truncated snapshots for one (model, N, closure) triple. The sparse
/// structure is computed once; filling values at a time t is allocation-free.
class GeneratorAssembler {
 public:
  GeneratorAssembler(const QueueModel& model, std::size_t n, Closure closure);

  std::size_t n() const { return n_; }
  Closure closure() const { return closure_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// A(t) = Q^T(t).
  TruncatedGenerator a(double t) const;
  /// Reduced matrix and forcing vector with A(t) p = A*(t) p + g(t) on
  /// stochastic p.
  std::pair<TruncatedGenerator, ForcingVector> a_star(double t) const;

  /// Allocation-free refills of a snapshot previously produced by this
  /// assembler (same n and closure).
  void fill_a(double t, TruncatedGenerator& out) const;
  void fill_a_star(double t, TruncatedGenerator& out, ForcingVector& g) const;

 private:
  TruncatedGenerator make_skeleton(GeneratorVariant variant) const;
  void fill_values(double t, TruncatedGenerator& out) const;

  const QueueModel* model_;
  std::size_t n_;
  Closure closure_;
  std::vector<std::string> warnings_;

  // Precomputed structure: per column, ascending row indices; parallel value
  // slot classification is implicit in the fill routine.
  std::vector<std::size_t> col_ptr_;
  std::vector<std::uint32_t> rows_;
  std::vector<double> b_values_;        // level_jump: b_i for i <= n
  std::vector<double> b_trunc_tail_;    // level_jump: sum_{j < i <= n} b_i
  std::vector<double> b_full_tail_;     // level_jump: B_{j+1} (untruncated)
  // general family: value sources per stored entry and per column diagonal.
  struct GeneralSlot {
    std::vector<std::uint32_t> arrival_idx;  // indices into model arrivals()
    std::vector<std::uint32_t> service_idx;
    bool catastrophe = false;
  };
  std::vector<GeneralSlot> general_slots_;      // one per stored entry
  std::vector<GeneralSlot> general_diagonal_;   // outflow sources per column
};

// Named operations over fresh snapshots.

TruncatedGenerator build_a(const QueueModel& model, std::size_t n, double t, Closure closure);

std::pair<TruncatedGenerator, ForcingVector> build_a_star(
    const QueueModel& model, std::size_t n, double t,
    Closure closure = Closure::defect_tracking);

/// D A* D^{-1}: entry (i, j) scaled by d_i / d_j, diagonal unchanged.
TruncatedGenerator apply_weights(const TruncatedGenerator& a_star, const WeightSequence& w);

}  // namespace catbound
