#include "catbound/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "catbound/errors.hpp"

namespace catbound {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!j.is_object()) throw ModelError(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ModelError(context + ": unknown field '" + key + "'");
  }
}

double require_number(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ModelError(context + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

std::vector<double> require_array(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ModelError(context + ": missing array field '" + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ModelError(context + ": field '" + key + "' must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

std::optional<double> optional_period(const json& j, const std::string& context) {
  if (!j.contains("period")) return std::nullopt;
  if (!j.at("period").is_number()) throw ModelError(context + ": 'period' must be numeric");
  return j.at("period").get<double>();
}

TrigPoly parse_trig_terms(const json& j, const std::string& context) {
  const double offset = require_number(j, "offset", context);
  std::vector<TrigTerm> terms;
  if (j.contains("terms")) {
    for (const auto& tj : j.at("terms")) {
      check_keys(tj, {"freq", "cos", "sin"}, context + ".terms[]");
      TrigTerm term;
      term.freq = require_number(tj, "freq", context + ".terms[]");
      if (tj.contains("cos")) term.cos_coef = tj.at("cos").get<double>();
      if (tj.contains("sin")) term.sin_coef = tj.at("sin").get<double>();
      terms.push_back(term);
    }
  }
  return TrigPoly(offset, std::move(terms));
}

TimeFunction parse_time_function(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ModelError(context + ": a rate must be an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  TimeFunction f = TimeFunction::constant(0.0);
  if (kind == "constant") {
    check_keys(j, {"kind", "value", "period"}, context);
    f = TimeFunction::constant(require_number(j, "value", context), optional_period(j, context));
  } else if (kind == "trig_poly") {
    check_keys(j, {"kind", "offset", "terms", "period"}, context);
    const TrigPoly poly = parse_trig_terms(j, context);
    f = TimeFunction::trig(poly.offset(), poly.terms(), optional_period(j, context));
  } else if (kind == "piecewise_constant") {
    check_keys(j, {"kind", "breakpoints", "values", "period"}, context);
    f = TimeFunction::piecewise(require_array(j, "breakpoints", context),
                                require_array(j, "values", context),
                                optional_period(j, context));
  } else if (kind == "tabulated") {
    check_keys(j, {"kind", "times", "values", "period"}, context);
    f = TimeFunction::tabulated(require_array(j, "times", context),
                                require_array(j, "values", context),
                                optional_period(j, context));
  } else {
    throw ModelError(context + ": unknown rate kind '" + kind + "'");
  }
  f.named(context);
  return f;
}

json time_function_to_json(const TimeFunction& f) {
  json j;
  switch (f.kind()) {
    case TimeFunctionKind::constant:
      j["kind"] = "constant";
      j["value"] = f.constant_value();
      break;
    case TimeFunctionKind::trig_poly: {
      j["kind"] = "trig_poly";
      j["offset"] = f.trig_data().offset();
      json terms = json::array();
      for (const auto& term : f.trig_data().terms()) {
        terms.push_back({{"freq", term.freq}, {"cos", term.cos_coef}, {"sin", term.sin_coef}});
      }
      j["terms"] = terms;
      break;
    }
    case TimeFunctionKind::piecewise_constant:
      j["kind"] = "piecewise_constant";
      j["breakpoints"] = f.breakpoints();
      j["values"] = f.values();
      break;
    case TimeFunctionKind::tabulated:
      j["kind"] = "tabulated";
      j["times"] = f.breakpoints();
      j["values"] = f.values();
      break;
  }
  if (f.period()) j["period"] = *f.period();
  return j;
}

CatastropheSpec parse_gamma(const json& j, const std::string& context) {
  check_keys(j, {"prefix", "tail"}, context);
  std::vector<TimeFunction> prefix;
  if (j.contains("prefix")) {
    std::size_t k = 1;
    for (const auto& pj : j.at("prefix")) {
      prefix.push_back(parse_time_function(pj, context + ".prefix[" + std::to_string(k) + "]"));
      ++k;
    }
  }
  if (!j.contains("tail")) {
    throw ModelError(context + ": a catastrophe specification needs a declared 'tail' rule so "
                     "the infimum over all states is exact");
  }
  const json& tj = j.at("tail");
  if (!tj.is_object() || !tj.contains("kind") || !tj.at("kind").is_string()) {
    throw ModelError(context + ".tail: expected an object with a 'kind'");
  }
  const std::string kind = tj.at("kind").get<std::string>();
  CatastropheSpec cats;
  cats.prefix = std::move(prefix);
  if (kind == "zero") {
    check_keys(tj, {"kind"}, context + ".tail");
    cats.tail = CatastropheTailKind::zero;
  } else if (kind == "constant_in_k") {
    check_keys(tj, {"kind", "rate"}, context + ".tail");
    cats.tail = CatastropheTailKind::constant_in_k;
    if (!tj.contains("rate")) throw ModelError(context + ".tail: missing 'rate'");
    cats.rate = parse_time_function(tj.at("rate"), context + ".tail.rate");
  } else if (kind == "power") {
    check_keys(tj, {"kind", "base", "coef", "power"}, context + ".tail");
    cats.tail = CatastropheTailKind::power;
    if (!tj.contains("base") || !tj.contains("coef")) {
      throw ModelError(context + ".tail: 'power' needs 'base' and 'coef'");
    }
    cats.base = parse_time_function(tj.at("base"), context + ".tail.base");
    cats.coef = parse_time_function(tj.at("coef"), context + ".tail.coef");
    cats.power = tj.contains("power") ? require_number(tj, "power", context + ".tail") : 1.0;
  } else {
    throw ModelError(context + ".tail: unknown kind '" + kind + "'");
  }
  cats.validate();
  return cats;
}

json gamma_to_json(const CatastropheSpec& cats) {
  json j;
  json prefix = json::array();
  for (const auto& f : cats.prefix) prefix.push_back(time_function_to_json(f));
  j["prefix"] = prefix;
  switch (cats.tail) {
    case CatastropheTailKind::zero:
      j["tail"] = {{"kind", "zero"}};
      break;
    case CatastropheTailKind::constant_in_k:
      j["tail"] = {{"kind", "constant_in_k"}, {"rate", time_function_to_json(*cats.rate)}};
      break;
    case CatastropheTailKind::power:
      j["tail"] = {{"kind", "power"},
                   {"base", time_function_to_json(*cats.base)},
                   {"coef", time_function_to_json(*cats.coef)},
                   {"power", cats.power}};
      break;
  }
  return j;
}

BSequence parse_b(const json& j, const std::string& context) {
  if (j.is_object() && j.contains("family")) {
    check_keys(j, {"family"}, context);
    const std::string family = j.at("family").get<std::string>();
    if (family == "cubic_telescoping") return BSequence::cubic_telescoping();
    throw ModelError(context + ": unknown b family '" + family + "'");
  }
  check_keys(j, {"values"}, context);
  return BSequence::explicit_list(require_array(j, "values", context));
}

json b_to_json(const BSequence& b) {
  if (b.family == BSequence::Family::cubic_telescoping) {
    return {{"family", "cubic_telescoping"}};
  }
  return {{"values", b.values}};
}

std::vector<RateEntry> parse_rate_entries(const json& j, const std::string& context) {
  std::vector<RateEntry> out;
  if (!j.is_array()) throw ModelError(context + ": expected an array");
  std::size_t i = 0;
  for (const auto& ej : j) {
    const std::string ctx = context + "[" + std::to_string(i) + "]";
    check_keys(ej, {"from", "jump", "rate"}, ctx);
    RateEntry e;
    e.from = static_cast<std::size_t>(require_number(ej, "from", ctx));
    e.jump = static_cast<std::size_t>(require_number(ej, "jump", ctx));
    if (!ej.contains("rate")) throw ModelError(ctx + ": missing 'rate'");
    e.rate = parse_time_function(ej.at("rate"), ctx + ".rate");
    out.push_back(std::move(e));
    ++i;
  }
  return out;
}

json rate_entries_to_json(const std::vector<RateEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    arr.push_back(
        {{"from", e.from}, {"jump", e.jump}, {"rate", time_function_to_json(e.rate)}});
  }
  return arr;
}

PaperClaims parse_claims(const json& j) {
  check_keys(j,
             {"beta_ss_lambda_coefficient", "beta_ss_form", "r_star_star", "b_star_star",
              "b_star", "limiting_bound"},
             "paper_claims");
  PaperClaims claims;
  auto grab = [&](const char* key, std::optional<double>& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  grab("beta_ss_lambda_coefficient", claims.beta_ss_lambda_coefficient);
  grab("r_star_star", claims.r_star_star);
  grab("b_star_star", claims.b_star_star);
  grab("b_star", claims.b_star);
  grab("limiting_bound", claims.limiting_bound);
  if (j.contains("beta_ss_form")) {
    check_keys(j.at("beta_ss_form"), {"offset", "terms"}, "paper_claims.beta_ss_form");
    claims.beta_ss_form = parse_trig_terms(j.at("beta_ss_form"), "paper_claims.beta_ss_form");
  }
  return claims;
}

json claims_to_json(const PaperClaims& claims) {
  json j = json::object();
  if (claims.beta_ss_lambda_coefficient) {
    j["beta_ss_lambda_coefficient"] = *claims.beta_ss_lambda_coefficient;
  }
  if (claims.beta_ss_form) {
    json terms = json::array();
    for (const auto& term : claims.beta_ss_form->terms()) {
      terms.push_back({{"freq", term.freq}, {"cos", term.cos_coef}, {"sin", term.sin_coef}});
    }
    j["beta_ss_form"] = {{"offset", claims.beta_ss_form->offset()}, {"terms", terms}};
  }
  if (claims.r_star_star) j["r_star_star"] = *claims.r_star_star;
  if (claims.b_star_star) j["b_star_star"] = *claims.b_star_star;
  if (claims.b_star) j["b_star"] = *claims.b_star;
  if (claims.limiting_bound) j["limiting_bound"] = *claims.limiting_bound;
  return j;
}

WeightSequence parse_weights(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ModelError(context + ": expected an object with a 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant_one") {
    check_keys(j, {"kind"}, context);
    return WeightSequence::constant_one();
  }
  if (kind == "linear") {
    check_keys(j, {"kind"}, context);
    return WeightSequence::linear();
  }
  if (kind == "geometric") {
    check_keys(j, {"kind", "rho"}, context);
    return WeightSequence::geometric(require_number(j, "rho", context));
  }
  if (kind == "explicit") {
    check_keys(j, {"kind", "values", "tail"}, context);
    WeightTail tail;
    if (j.contains("tail")) {
      const json& tj = j.at("tail");
      check_keys(tj, {"kind", "slope"}, context + ".tail");
      const std::string tkind = tj.at("kind").get<std::string>();
      if (tkind == "constant") {
        tail.kind = WeightTailKind::constant;
      } else if (tkind == "linear") {
        tail.kind = WeightTailKind::linear;
        tail.slope = require_number(tj, "slope", context + ".tail");
      } else {
        throw ModelError(context + ".tail: unknown kind '" + tkind + "'");
      }
    }
    return WeightSequence::explicit_tail(require_array(j, "values", context), tail);
  }
  throw ModelError(context + ": unknown weights kind '" + kind + "'");
}

json weights_to_json(const WeightSequence& w) {
  switch (w.kind()) {
    case WeightKind::constant_one:
      return {{"kind", "constant_one"}};
    case WeightKind::linear:
      return {{"kind", "linear"}};
    case WeightKind::geometric:
      return {{"kind", "geometric"}, {"rho", w.rho()}};
    case WeightKind::explicit_tail: {
      json j = {{"kind", "explicit"}, {"values", w.prefix()}};
      if (w.tail().kind == WeightTailKind::constant) {
        j["tail"] = {{"kind", "constant"}};
      } else {
        j["tail"] = {{"kind", "linear"}, {"slope", w.tail().slope}};
      }
      return j;
    }
  }
  return {{"kind", "constant_one"}};
}

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

ModelSpec parse_model_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model spec is not valid JSON: ") + e.what());
  }
  check_keys(j, {"model", "weights", "paper_claims"}, "spec");
  if (!j.contains("model")) throw ModelError("spec: missing 'model'");
  const json& mj = j.at("model");
  if (!mj.is_object() || !mj.contains("family") || !mj.at("family").is_string()) {
    throw ModelError("model: expected an object with a 'family'");
  }
  const std::string family = mj.at("family").get<std::string>();
  ModelSpec spec;
  if (family == "level_jump") {
    check_keys(mj, {"family", "lambda", "mu", "gamma", "b"}, "model");
    for (const char* key : {"lambda", "mu", "gamma", "b"}) {
      if (!mj.contains(key)) throw ModelError(std::string("model: missing '") + key + "'");
    }
    spec.model = QueueModel::level_jump(parse_time_function(mj.at("lambda"), "lambda"),
                                        parse_time_function(mj.at("mu"), "mu"),
                                        parse_gamma(mj.at("gamma"), "gamma"),
                                        parse_b(mj.at("b"), "b"));
  } else if (family == "general") {
    check_keys(mj, {"family", "arrivals", "services", "gamma"}, "model");
    if (!mj.contains("gamma")) throw ModelError("model: missing 'gamma'");
    spec.model = QueueModel::general(
        mj.contains("arrivals") ? parse_rate_entries(mj.at("arrivals"), "arrivals")
                                : std::vector<RateEntry>{},
        mj.contains("services") ? parse_rate_entries(mj.at("services"), "services")
                                : std::vector<RateEntry>{},
        parse_gamma(mj.at("gamma"), "gamma"));
  } else {
    throw ModelError("model: unknown family '" + family + "'");
  }
  if (j.contains("weights")) spec.weights = parse_weights(j.at("weights"), "weights");
  if (j.contains("paper_claims")) spec.claims = parse_claims(j.at("paper_claims"));
  return spec;
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model spec '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_spec(buffer.str());
}

std::string serialize_model_spec(const ModelSpec& spec, int indent) {
  json j;
  json mj;
  if (spec.model.is_level_jump()) {
    mj["family"] = "level_jump";
    mj["lambda"] = time_function_to_json(spec.model.lambda());
    mj["mu"] = time_function_to_json(spec.model.mu());
    mj["gamma"] = gamma_to_json(spec.model.catastrophes());
    mj["b"] = b_to_json(spec.model.b_sequence());
  } else {
    mj["family"] = "general";
    mj["arrivals"] = rate_entries_to_json(spec.model.arrivals());
    mj["services"] = rate_entries_to_json(spec.model.services());
    mj["gamma"] = gamma_to_json(spec.model.catastrophes());
  }
  j["model"] = mj;
  if (spec.weights) j["weights"] = weights_to_json(*spec.weights);
  if (spec.claims.any()) j["paper_claims"] = claims_to_json(spec.claims);
  return j.dump(indent) + "\n";
}

WeightSequence parse_weight_selector(const std::string& selector) {
  if (selector == "linear") return WeightSequence::linear();
  if (selector == "one" || selector == "constant_one") return WeightSequence::constant_one();
  if (selector.rfind("geometric:", 0) == 0) {
    const std::string arg = selector.substr(10);
    try {
      return WeightSequence::geometric(std::stod(arg));
    } catch (const std::invalid_argument&) {
      throw ModelError("weights selector 'geometric:RHO' needs a numeric RHO, got '" + arg +
                       "'");
    }
  }
  if (selector.rfind("file:", 0) == 0) {
    const std::filesystem::path path = selector.substr(5);
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open weights file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_weights_json(buffer.str());
  }
  throw ModelError("unknown weights selector '" + selector +
                   "' (expected linear|one|geometric:RHO|file:PATH)");
}

WeightSequence parse_weights_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("weights spec is not valid JSON: ") + e.what());
  }
  return parse_weights(j, "weights");
}

std::string serialize_weights(const WeightSequence& w, int indent) {
  return weights_to_json(w).dump(indent) + "\n";
}

std::string bound_report_to_json(const BoundReport& report, int indent) {
  json j;
  j["truncation"] = {{"N", report.truncation_n}, {"tail_certified", report.tail_certified}};
  j["b_star"] = report.b_star;
  j["b_star_grid_delta"] = report.b_star_grid_delta;
  j["b_double_star_mean"] = report.beta_ss_mean;
  j["mean_is_periodic"] = report.mean_is_periodic;
  j["period"] = report.period ? json(*report.period) : json(nullptr);
  if (report.envelope) {
    j["R_star_star"] = report.envelope->r_star_star;
    j["b_star_star"] = report.envelope->b_star_star;
    j["envelope_grid_error"] = report.envelope->grid_error;
  } else {
    j["R_star_star"] = nullptr;
    j["b_star_star"] = nullptr;
    j["envelope_failure"] = report.envelope_failure;
  }
  json t1;
  t1["general"] = {{"prefactor", report.convergence.general_prefactor}};
  t1["uniform"] = report.convergence.uniform_coefficient
                      ? json{{"coefficient", *report.convergence.uniform_coefficient}}
                      : json(nullptr);
  t1["mean"] = report.convergence.mean_inv_w
                   ? json{{"inv_w", *report.convergence.mean_inv_w},
                          {"d0", report.convergence.d0}}
                   : json(nullptr);
  j["theorem1"] = t1;
  j["theorem2"] = report.limiting_bound ? json(*report.limiting_bound) : json(nullptr);
  if (report.limiting_bound_claimed) j["theorem2_claimed"] = *report.limiting_bound_claimed;
  if (report.claimed_rate_envelope) {
    j["claimed_rate_envelope"] = {{"R_star_star", report.claimed_rate_envelope->r_star_star},
                                  {"b_star_star", report.claimed_rate_envelope->b_star_star}};
  }
  json discrepancies = json::array();
  for (const auto& d : report.discrepancies) {
    discrepancies.push_back({{"quantity", d.quantity},
                             {"first_principles", number_or_null(d.first_principles)},
                             {"claimed", d.claimed},
                             {"claim_sound", d.claim_sound},
                             {"note", d.note}});
  }
  j["discrepancies"] = discrepancies;
  j["weights"] = {{"d", report.weight_constants.d},
                  {"d_star", number_or_null(report.weight_constants.d_star)},
                  {"w", report.weight_constants.w}};
  j["advisory"] = {{"sum_b", report.advisory.sum_b},
                   {"sum_k_b", report.advisory.sum_k_b},
                   {"sum_k_tail_finite", report.advisory.sum_k_tail_finite}};
  j["beta_star_convention"] = report.beta_star_convention;
  return j.dump(indent) + "\n";
}

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  const std::size_t dim = trajectory.dimension();
  os << "t";
  for (std::size_t k = 0; k < dim; ++k) os << ",p" << k;
  os << ",tail_defect,norm_1D,mean\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    os << format_float(trajectory.times[i]);
    for (std::size_t k = 0; k < dim; ++k) {
      os << ',' << format_float(trajectory.probabilities[i][k]);
    }
    os << ',' << format_float(trajectory.tail_defect[i]) << ','
       << format_float(trajectory.weighted_norm[i]) << ',' << format_float(trajectory.mean[i])
       << '\n';
  }
}

void write_pair_csv(std::ostream& os, const PairDiagnostics& diagnostics) {
  os << "t,norm_l1,norm_1D,bound_lognorm3,bound_20101,ratio\n";
  for (std::size_t i = 0; i < diagnostics.times.size(); ++i) {
    os << format_float(diagnostics.times[i]) << ',' << format_float(diagnostics.norm_l1[i])
       << ',' << format_float(diagnostics.norm_1d[i]) << ','
       << format_float(diagnostics.bound_lognorm3[i]) << ','
       << format_float(diagnostics.bound_general[i]) << ','
       << format_float(diagnostics.ratio[i]) << '\n';
  }
}

void write_beta_csv(std::ostream& os, const BoundReport& report, const WeightSequence& w) {
  os << "t,beta_ss,integral_beta,bound_20101\n";
  const double initial_norm = w.d0() + w[1];  // canonical pair (delta_0, delta_1)
  for (std::size_t i = 0; i < report.grid_t.size(); ++i) {
    const double bound = report.convergence.general_prefactor * initial_norm *
                         std::exp(-report.grid_integral[i]);
    os << format_float(report.grid_t[i]) << ',' << format_float(report.grid_beta[i]) << ','
       << format_float(report.grid_integral[i]) << ',' << format_float(bound) << '\n';
  }
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble) {
  os << "t,state,empirical_p,stderr\n";
  for (std::size_t ti = 0; ti < ensemble.evaluation_times.size(); ++ti) {
    for (std::size_t k = 0; k < ensemble.empirical[ti].size(); ++k) {
      os << format_float(ensemble.evaluation_times[ti]) << ',' << k << ','
         << format_float(ensemble.empirical[ti][k]) << ','
         << format_float(ensemble.standard_error[ti][k]) << '\n';
    }
  }
}

void write_event_log(std::ostream& os, const PathEnsemble& ensemble) {
  for (std::size_t p = 0; p < ensemble.paths.size(); ++p) {
    json events = json::array();
    for (const auto& e : ensemble.paths[p]) {
      const char* kind = e.kind == JumpKind::arrival
                             ? "arrival"
                             : e.kind == JumpKind::service ? "service" : "catastrophe";
      events.push_back(
          {{"time", e.time}, {"from", e.from}, {"to", e.to}, {"kind", kind}});
    }
    os << json({{"path", p}, {"events", events}}).dump() << '\n';
  }
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace catbound
