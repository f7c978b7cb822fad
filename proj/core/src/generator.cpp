#include "catbound/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "catbound/errors.hpp"

namespace catbound {

// ---------------------------------------------------------------------------
// TruncatedGenerator

TruncatedGenerator::TruncatedGenerator(std::size_t n, Closure closure, GeneratorVariant variant)
    : n_(n), closure_(closure), variant_(variant), diag_(n + 1, 0.0), col_ptr_(n + 2, 0) {}

double TruncatedGenerator::entry(std::size_t i, std::size_t j) const {
  if (i == j) return diag_[j];
  for (const auto& e : column(j)) {
    if (e.row == i) return e.value;
  }
  return 0.0;
}

double TruncatedGenerator::off_diagonal_column_sum(std::size_t j) const {
  double s = 0.0;
  for (const auto& e : column(j)) s += e.value;
  return s;
}

double TruncatedGenerator::column_sum(std::size_t j) const {
  return diag_[j] + off_diagonal_column_sum(j);
}

void TruncatedGenerator::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t dim = dimension();
  for (std::size_t i = 0; i < dim; ++i) out[i] = diag_[i] * x[i];
  for (std::size_t j = 0; j < dim; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (const auto& e : column(j)) out[e.row] += e.value * xj;
  }
}

std::vector<std::vector<double>> TruncatedGenerator::dense() const {
  std::vector<std::vector<double>> m(dimension(), std::vector<double>(dimension(), 0.0));
  for (std::size_t j = 0; j < dimension(); ++j) {
    m[j][j] = diag_[j];
    for (const auto& e : column(j)) m[e.row][j] = e.value;
  }
  return m;
}

std::string TruncatedGenerator::coordinate_dump() const {
  std::ostringstream os;
  char buf[64];
  for (std::size_t j = 0; j < dimension(); ++j) {
    bool diag_written = false;
    auto write = [&](std::size_t i, double v) {
      std::snprintf(buf, sizeof(buf), "%zu %zu %.17g\n", i, j, v);
      os << buf;
    };
    for (const auto& e : column(j)) {
      if (!diag_written && e.row > j) {
        write(j, diag_[j]);
        diag_written = true;
      }
      write(e.row, e.value);
    }
    if (!diag_written) write(j, diag_[j]);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// GeneratorAssembler

GeneratorAssembler::GeneratorAssembler(const QueueModel& model, std::size_t n, Closure closure)
    : model_(&model), n_(n), closure_(closure) {
  if (n < 1) throw ModelError("truncation level must be at least 1");
  const std::size_t dim = n + 1;
  col_ptr_.assign(dim + 1, 0);

  if (model.is_level_jump()) {
    const auto& b = model.b_sequence();
    b_values_.assign(dim, 0.0);
    for (std::size_t i = 1; i <= n; ++i) b_values_[i] = b.at(i);
    b_trunc_tail_.assign(dim, 0.0);
    for (std::size_t j = n; j-- > 0;) {
      b_trunc_tail_[j] = b_trunc_tail_[j + 1] + b_values_[j + 1];
    }
    b_full_tail_.assign(dim, 0.0);
    for (std::size_t j = 0; j <= n; ++j) b_full_tail_[j] = b.tail_sum(j + 1);

    const double dropped = b.tail_sum(n + 1);
    if (dropped > 0.5) {
      warnings_.push_back("truncation keeps less than half of the arrival target mass "
                          "(B_{N+1} = " + std::to_string(dropped) + "); increase N");
    }

    const bool cat_entries = !model.catastrophes().is_zero();
    for (std::size_t j = 0; j <= n; ++j) {
      col_ptr_[j] = rows_.size();
      if (j >= 1 && (cat_entries || j == 1)) rows_.push_back(0);
      if (j >= 2) rows_.push_back(static_cast<std::uint32_t>(j - 1));
      for (std::size_t i = j + 1; i <= n; ++i) {
        if (b_values_[i] > 0.0) rows_.push_back(static_cast<std::uint32_t>(i));
      }
    }
    col_ptr_[dim] = rows_.size();
    return;
  }

  // General rate maps: collect per-column slots, merging sources that land on
  // the same row (service to empty pools with the catastrophe entry).
  const bool cat_entries = !model.catastrophes().is_zero();
  general_diagonal_.assign(dim, GeneralSlot{});
  std::vector<std::vector<std::pair<std::uint32_t, GeneralSlot>>> columns(dim);
  auto slot_for = [&](std::size_t j, std::uint32_t row) -> GeneralSlot& {
    auto& col = columns[j];
    for (auto& [r, slot] : col) {
      if (r == row) return slot;
    }
    col.emplace_back(row, GeneralSlot{});
    return col.back().second;
  };

  const auto& arrivals = model.arrivals();
  for (std::uint32_t idx = 0; idx < arrivals.size(); ++idx) {
    const auto& e = arrivals[idx];
    if (e.from > n) continue;
    const std::size_t target = e.from + e.jump;
    if (target <= n) {
      slot_for(e.from, static_cast<std::uint32_t>(target)).arrival_idx.push_back(idx);
      general_diagonal_[e.from].arrival_idx.push_back(idx);
    } else if (closure == Closure::defect_tracking) {
      general_diagonal_[e.from].arrival_idx.push_back(idx);
    }
  }
  const auto& services = model.services();
  for (std::uint32_t idx = 0; idx < services.size(); ++idx) {
    const auto& e = services[idx];
    if (e.from > n) continue;
    slot_for(e.from, static_cast<std::uint32_t>(e.from - e.jump)).service_idx.push_back(idx);
    general_diagonal_[e.from].service_idx.push_back(idx);
  }
  if (cat_entries) {
    for (std::size_t j = 1; j <= n; ++j) {
      slot_for(j, 0).catastrophe = true;
      general_diagonal_[j].catastrophe = true;
    }
  }
  for (std::size_t j = 0; j <= n; ++j) {
    auto& col = columns[j];
    std::sort(col.begin(), col.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    col_ptr_[j] = rows_.size();
    for (auto& [row, slot] : col) {
      rows_.push_back(row);
      general_slots_.push_back(std::move(slot));
    }
  }
  col_ptr_[dim] = rows_.size();
}

TruncatedGenerator GeneratorAssembler::make_skeleton(GeneratorVariant variant) const {
  TruncatedGenerator g(n_, closure_, variant);
  g.col_ptr_ = col_ptr_;
  g.entries_.resize(rows_.size());
  for (std::size_t e = 0; e < rows_.size(); ++e) g.entries_[e] = {rows_[e], 0.0};
  return g;
}

void GeneratorAssembler::fill_values(double t, TruncatedGenerator& out) const {
  out.time_ = t;
  const QueueModel& model = *model_;
  const auto& cats = model.catastrophes();

  if (model.is_level_jump()) {
    const double lambda_t = model.lambda()(t);
    const double mu_t = model.mu()(t);
    // Hoisted tail-rule evaluations: beta_j(t) is then O(1) per state.
    double tail_base = 0.0, tail_coef = 0.0;
    switch (cats.tail) {
      case CatastropheTailKind::zero:
        break;
      case CatastropheTailKind::constant_in_k:
        tail_base = (*cats.rate)(t);
        break;
      case CatastropheTailKind::power:
        tail_base = (*cats.base)(t);
        tail_coef = (*cats.coef)(t);
        break;
    }
    auto beta_at = [&](std::size_t j) -> double {
      if (j <= cats.prefix.size()) return cats.prefix[j - 1](t);
      if (cats.tail == CatastropheTailKind::power) {
        return tail_base + tail_coef / std::pow(static_cast<double>(j), cats.power);
      }
      return tail_base;
    };

    for (std::size_t j = 0; j <= n_; ++j) {
      const double beta_j = j >= 1 ? beta_at(j) : 0.0;
      auto* entries = out.entries_.data() + out.col_ptr_[j];
      const std::size_t count = out.col_ptr_[j + 1] - out.col_ptr_[j];
      for (std::size_t e = 0; e < count; ++e) {
        const std::uint32_t row = entries[e].row;
        if (row == 0 && j >= 1) {
          entries[e].value = (j == 1 ? mu_t : 0.0) + beta_j;
        } else if (row + 1 == j) {
          entries[e].value = mu_t;
        } else {
          entries[e].value = lambda_t * b_values_[row];
        }
      }
      const double arrival_out = closure_ == Closure::reflecting
                                     ? lambda_t * b_trunc_tail_[j]
                                     : lambda_t * b_full_tail_[j];
      out.diag_[j] = -(arrival_out + (j >= 1 ? mu_t + beta_j : 0.0));
    }
    return;
  }

  // General family: evaluate each map entry once per fill.
  const auto& arrivals = model.arrivals();
  const auto& services = model.services();
  std::vector<double> arrival_vals(arrivals.size());
  std::vector<double> service_vals(services.size());
  for (std::size_t i = 0; i < arrivals.size(); ++i) arrival_vals[i] = arrivals[i].rate(t);
  for (std::size_t i = 0; i < services.size(); ++i) service_vals[i] = services[i].rate(t);

  auto slot_value = [&](const GeneralSlot& slot, std::size_t j) {
    double v = 0.0;
    for (auto idx : slot.arrival_idx) v += arrival_vals[idx];
    for (auto idx : slot.service_idx) v += service_vals[idx];
    if (slot.catastrophe) v += cats.value(j, t);
    return v;
  };

  for (std::size_t j = 0; j <= n_; ++j) {
    const std::size_t begin = out.col_ptr_[j];
    const std::size_t count = out.col_ptr_[j + 1] - begin;
    for (std::size_t e = 0; e < count; ++e) {
      out.entries_[begin + e].value = slot_value(general_slots_[begin + e], j);
    }
    out.diag_[j] = -slot_value(general_diagonal_[j], j);
  }
}

void GeneratorAssembler::fill_a(double t, TruncatedGenerator& out) const {
  if (out.n_ != n_ || out.closure_ != closure_ || out.variant_ != GeneratorVariant::a) {
    throw std::logic_error("fill_a: snapshot does not belong to this assembler");
  }
  fill_values(t, out);
}

void GeneratorAssembler::fill_a_star(double t, TruncatedGenerator& out, ForcingVector& g) const {
  if (out.n_ != n_ || out.closure_ != closure_ || out.variant_ != GeneratorVariant::a_star) {
    throw std::logic_error("fill_a_star: snapshot does not belong to this assembler");
  }
  fill_values(t, out);
  const double bs = model_->catastrophes().infimum(t);
  g.dimension = n_ + 1;
  g.beta_star = bs;
  if (bs == 0.0) return;
  out.diag_[0] -= bs;
  for (std::size_t j = 1; j <= n_; ++j) {
    auto col = out.col_ptr_[j];
    // Row indices ascend, so a row-0 entry is first in its column.
    if (out.col_ptr_[j + 1] > col && out.entries_[col].row == 0) {
      out.entries_[col].value -= bs;
    } else {
      throw std::logic_error("reduced matrix needs a row-0 entry in every column when "
                             "beta* > 0");
    }
  }
}

TruncatedGenerator GeneratorAssembler::a(double t) const {
  TruncatedGenerator g = make_skeleton(GeneratorVariant::a);
  fill_a(t, g);
  return g;
}

std::pair<TruncatedGenerator, ForcingVector> GeneratorAssembler::a_star(double t) const {
  TruncatedGenerator g = make_skeleton(GeneratorVariant::a_star);
  ForcingVector f;
  fill_a_star(t, g, f);
  return {std::move(g), f};
}

// ---------------------------------------------------------------------------
// Named operations

TruncatedGenerator build_a(const QueueModel& model, std::size_t n, double t, Closure closure) {
  return GeneratorAssembler(model, n, closure).a(t);
}

std::pair<TruncatedGenerator, ForcingVector> build_a_star(const QueueModel& model, std::size_t n,
                                                          double t, Closure closure) {
  return GeneratorAssembler(model, n, closure).a_star(t);
}

TruncatedGenerator apply_weights(const TruncatedGenerator& a_star, const WeightSequence& w) {
  if (a_star.variant() != GeneratorVariant::a_star) {
    throw ModelError("apply_weights expects a reduced (A*) snapshot");
  }
  TruncatedGenerator out = a_star;
  out.variant_ = GeneratorVariant::a_star_weighted;
  std::vector<double> d(out.dimension());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = w[k];
  for (std::size_t j = 0; j < out.dimension(); ++j) {
    for (std::size_t e = out.col_ptr_[j]; e < out.col_ptr_[j + 1]; ++e) {
      out.entries_[e].value *= d[out.entries_[e].row] / d[j];
    }
  }
  return out;
}

}  // namespace catbound
