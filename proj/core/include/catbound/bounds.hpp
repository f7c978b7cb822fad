#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catbound/generator.hpp"
#include "catbound/model.hpp"
#include "catbound/trig_poly.hpp"
#include "catbound/weights.hpp"

namespace catbound {

/// Exponential envelope exp(-integral_s^t beta**) <= R** exp(-b**(t-s)).
struct EnvelopeFit {
  double r_star_star = 1.0;
  double b_star_star = 0.0;
  /// Difference in R** between the working grid and a doubled grid; zero for
  /// closed-form fits up to extremum-refinement residual.
  double grid_error = 0.0;
};

/// One evaluation of the contraction rate, with provenance.
struct BetaSample {
  double value = 0.0;
  /// Column attaining the minimum among columns 0..N (ignored when the tail
  /// bound binds).
  std::size_t argmin_column = 0;
  /// True when the analytic tail lower bound, not a stored column, produced
  /// the value.
  bool tail_binds = false;
};

/// Column-sum contraction rate of the weighted reduced matrix D A*(t) D^{-1}:
/// the infimum over columns of |diagonal| minus the off-diagonal column sum.
///
/// Columns 0..N are computed from the defect-tracking snapshot, corrected by
/// the exact weighted mass of arrival entries beyond the truncation when the
/// model family admits one (level-jump arrivals, single service, declared
/// catastrophe tail). Columns beyond N are covered by an analytic lower
/// bound; when that bound is weaker than the finite minimum the infimum is
/// certified exact, otherwise the bound itself is returned (still sound: it
/// never overstates the contraction rate). General rate maps fall back to
/// the truncated infimum with tail_certified() == false.
class ContractionRate {
 public:
  ContractionRate(const QueueModel& model, const WeightSequence& w, std::size_t n);

  // The assembler aliases the stored model copy.
  ContractionRate(const ContractionRate&) = delete;
  ContractionRate& operator=(const ContractionRate&) = delete;

  double operator()(double t) const { return sample(t).value; }
  BetaSample sample(double t) const;

  /// Integral over [t0, t1]: exact antiderivative when the rate has a
  /// certified trigonometric closed form, adaptive Gauss-Kronrod otherwise
  /// (absolute tolerance `tol`).
  double integrate(double t0, double t1, double tol = 1e-10) const;

  bool tail_certified() const { return tail_certified_; }
  const std::optional<TrigPoly>& closed_form() const { return closed_form_; }
  std::size_t truncation() const { return n_; }
  /// sum_{i >= 1} d_i b_i for the level-jump family (throws
  /// BoundUndefinedError when the weighted series diverges).
  double weighted_b_total() const;

 private:
  double tail_lower_bound(double t, double lambda_t, double mu_t) const;

  QueueModel model_;
  WeightSequence weights_;
  std::size_t n_;
  std::shared_ptr<const GeneratorAssembler> assembler_;
  std::vector<double> weight_ratio_;  // d_row/d_col per stored entry
  std::vector<double> inv_weight_;    // 1/d_j per column
  bool analytic_family_ = false;
  bool tail_certified_ = false;
  double weighted_b_total_ = 0.0;   // sum_{i>=1} d_i b_i
  double weighted_b_beyond_n_ = 0.0;   // sum_{i>N} d_i b_i
  double weighted_b_beyond_n1_ = 0.0;  // sum_{i>N+1} d_i b_i
  double tail_weight_inf_ = 1.0;       // inf_{k>N} d_k
  double tail_service_penalty_ = 0.0;  // max(0, sup_{k>N} d_{k-1}/d_k - 1)
  double tail_cat_penalty_ = 0.0;      // catastrophe distortion for d_k < d_0
  std::optional<TrigPoly> closed_form_;
};

/// Named operation form: one evaluation of the contraction rate.
BetaSample beta_double_star(const QueueModel& model, const WeightSequence& w, std::size_t n,
                            double t);

double integrate_beta(const ContractionRate& beta, double t0, double t1, double tol = 1e-10);

/// Fit (R**, b**) for a sampled T-periodic rate: b** is the period mean and
/// R** = exp(max - min of the drift G(t) = b** t - integral_0^t beta), both
/// on a refined grid (>= 512 nodes/period) with the refinement delta
/// reported. Throws BoundUndefinedError when the mean is nonpositive.
EnvelopeFit fit_envelope(const std::function<double(double)>& beta, double period,
                         std::size_t grid = 2048);

/// Closed-form fit: exact mean, extrema located by bisection on the known
/// derivative.
EnvelopeFit fit_envelope(const TrigPoly& beta, double period);

/// b* = sup_t beta*(t) over one period (or [0, t_max]), grid sup at 2048
/// nodes plus the declared tail rule; exact for closed forms. The returned
/// pair is (value, grid refinement delta).
std::pair<double, double> beta_star_sup(const QueueModel& model, double t_max);

/// R** d0 b* / b**.
double limiting_regime_bound(double r_star_star, double d0, double b_star, double b_star_star);
double limiting_regime_bound(const EnvelopeFit& envelope, double d0, double b_star);

/// Headline constants claimed by an external source for the same model, used
/// to populate the report's discrepancy list.
struct PaperClaims {
  std::optional<double> beta_ss_lambda_coefficient;  // beta** = beta* - c * lambda
  std::optional<TrigPoly> beta_ss_form;              // claimed closed form of beta**
  std::optional<double> r_star_star;
  std::optional<double> b_star_star;
  std::optional<double> b_star;
  std::optional<double> limiting_bound;

  bool any() const {
    return beta_ss_lambda_coefficient || beta_ss_form || r_star_star || b_star_star || b_star ||
           limiting_bound;
  }
  bool operator==(const PaperClaims&) const = default;
};

struct Discrepancy {
  std::string quantity;
  double first_principles;  // NaN when undefined
  double claimed;
  bool claim_sound;  // claimed value still yields a valid (if loose) bound
  std::string note;
};

/// Convergence-rate bound coefficients: the bound curves are
///   general: prefactor * ||D(p*(0)-p**(0))|| * exp(-I(t))
///   uniform: coefficient * exp(-I(t))            (requires d* finite)
///   mean:    (d0 + d_j) * inv_w * exp(-I(t))     (requires W > 0)
struct ConvergenceBounds {
  double general_prefactor = 1.0;            // 1/d
  std::optional<double> uniform_coefficient;  // 2 d*/d
  std::optional<double> mean_inv_w;           // 1/W
  double d0 = 1.0;
};

struct SummabilityAdvisory {
  double sum_b = 0.0;        // sum b_k
  double sum_k_b = 0.0;      // sum k b_k = sum_{k>=1} B_k
  bool sum_k_tail_finite = true;  // sum_k k B_k < infinity
};

struct BoundOptions {
  std::size_t truncation = 200;
  double t_max = 10.0;
  std::size_t grid = 201;
  double quad_tol = 1e-10;
  PaperClaims claims;
};

/// Everything the bound computation produces: the rate samples, its
/// integral, the envelope, and the evaluated bound coefficients.
struct BoundReport {
  std::size_t truncation_n = 0;
  bool tail_certified = false;
  std::optional<double> period;

  double b_star = 0.0;        // sup_t beta*(t)
  double b_star_grid_delta = 0.0;
  double beta_ss_mean = 0.0;  // over one period, or [0, t_max] when aperiodic
  bool mean_is_periodic = false;  // false => divergence certificate heuristic

  std::optional<EnvelopeFit> envelope;
  std::string envelope_failure;

  WeightConstants weight_constants{1.0, 1.0, 0.0};
  ConvergenceBounds convergence;
  std::optional<double> limiting_bound;          // derived R** d0 b*/b**
  std::optional<double> limiting_bound_claimed;  // from claimed constants
  std::optional<EnvelopeFit> claimed_rate_envelope;  // fit of the claimed beta** form

  std::vector<double> grid_t;
  std::vector<double> grid_beta;
  std::vector<double> grid_integral;
  std::vector<std::size_t> grid_argmin;
  std::vector<bool> grid_tail_binds;

  std::optional<TrigPoly> closed_form;
  std::vector<Discrepancy> discrepancies;
  SummabilityAdvisory advisory;
  std::string beta_star_convention = "infimum over states k >= 1";
  PaperClaims claims;

  std::shared_ptr<const ContractionRate> rate;  // evaluator (not serialized)

  double beta_at(double t) const;
  /// I(t) = integral_0^t beta**; exact via closed form, otherwise cached
  /// grid nodes plus quadrature for off-node times.
  double integral_at(double t) const;

  double general_bound(double t, double weighted_initial_norm) const;
  std::optional<double> uniform_bound(double t) const;
  std::optional<double> mean_bound(double t, std::size_t j, const WeightSequence& w) const;
  /// The claimed-constant display form R_claimed * d_j * exp(-b_claimed t).
  std::optional<double> claimed_mean_display(double t, std::size_t j,
                                             const WeightSequence& w) const;
};

BoundReport compute_bound_report(const QueueModel& model, const WeightSequence& w,
                                 const BoundOptions& options);

/// Report wrapping a user-asserted constant contraction rate; used by the
/// falsification path of the verifier.
BoundReport asserted_constant_rate_report(double rate, const WeightSequence& w,
                                          const BoundOptions& options);

}  // namespace catbound
