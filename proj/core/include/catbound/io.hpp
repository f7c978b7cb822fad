#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "catbound/bounds.hpp"
#include "catbound/model.hpp"
#include "catbound/montecarlo.hpp"
#include "catbound/solver.hpp"
#include "catbound/weights.hpp"

namespace catbound {

/// Parsed model specification file: the model, optional weights, and
/// optional externally claimed constants.
struct ModelSpec {
  QueueModel model = QueueModel::example_corrected();
  std::optional<WeightSequence> weights;
  PaperClaims claims;
};

/// Parse a model specification (JSON, UTF-8). Unknown fields are rejected so
/// a typo in a rate definition cannot silently change the model.
ModelSpec parse_model_spec(const std::string& json_text);
ModelSpec load_model_spec(const std::filesystem::path& path);

std::string serialize_model_spec(const ModelSpec& spec, int indent = 2);

/// Weights from a CLI-style selector: "linear", "one", "geometric:RHO" or
/// "file:PATH" (a JSON weights object).
WeightSequence parse_weight_selector(const std::string& selector);
WeightSequence parse_weights_json(const std::string& json_text);
std::string serialize_weights(const WeightSequence& w, int indent = 2);

std::string bound_report_to_json(const BoundReport& report, int indent = 2);

// CSV writers; all floating point at 17 significant digits.

/// Header: t,p0,...,pN,tail_defect,norm_1D,mean
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Header: t,norm_l1,norm_1D,bound_lognorm3,bound_20101,ratio
void write_pair_csv(std::ostream& os, const PairDiagnostics& diagnostics);

/// Header: t,beta_ss,integral_beta,bound_20101
/// The bound column is the general bound for the canonical pair
/// (delta_0, delta_1), i.e. prefactor * (d0 + d1) * exp(-I(t)).
void write_beta_csv(std::ostream& os, const BoundReport& report, const WeightSequence& w);

/// Header: t,state,empirical_p,stderr
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble);

/// Per-path event log, one JSON object per line.
void write_event_log(std::ostream& os, const PathEnsemble& ensemble);

/// Write via a temporary file in the same directory plus an atomic rename,
/// so failures never leave partial output behind.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

/// printf-style %.17g formatting used by every writer.
std::string format_float(double v);

}  // namespace catbound
