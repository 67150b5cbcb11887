#include "arcsearch/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "arcsearch/errors.hpp"
#include "json.hpp"

namespace arcsearch {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_num(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError("expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw ParseError("expected a number");
  return j.get<double>();
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Vec vec_from(const json& a) {
  if (!a.is_array()) throw ParseError("expected an array");
  Vec v(static_cast<Eigen::Index>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_num(a[i]);
  return v;
}

const char* to_string(MultiplierStart m) {
  return m == MultiplierStart::ones ? "ones" : "gradient_scaled";
}

MultiplierStart multiplier_start_from(const std::string& s) {
  if (s == "ones") return MultiplierStart::ones;
  if (s == "gradient_scaled" || s == "gradient-scaled") return MultiplierStart::gradient_scaled;
  throw ParseError("unknown multiplier_start '" + s + "'");
}

json config_json(const SolverConfig& c) {
  json j;
  j["variant"] = c.variant;
  j["epsilon"] = num(c.epsilon);
  j["max_iter"] = c.max_iter;
  j["delta1"] = num(c.step.delta1);
  j["delta2"] = num(c.step.delta2);
  j["rho"] = num(c.step.rho);
  j["backtrack"] = num(c.step.backtrack);
  j["alpha_min"] = num(c.step.alpha_min);
  j["interior_samples"] = c.step.interior_samples;
  j["sigma_bar"] = num(c.sigma_bar);
  j["sigma_cap_override"] = c.sigma_cap_override ? num(*c.sigma_cap_override) : json(nullptr);
  j["rhs_mode"] = c.rhs_mode ? json(to_string(*c.rhs_mode)) : json(nullptr);
  j["multiplier_start"] = to_string(c.multiplier_start);
  const RegularizationPolicy& r = c.regularization;
  j["regularization"] = {{"initial", num(r.initial)},
                         {"growth", num(r.growth)},
                         {"max", num(r.max)},
                         {"min_rcond", num(r.min_rcond)},
                         {"curvature_correction", r.curvature_correction},
                         {"descent_fallback", r.descent_fallback},
                         {"minimum", num(r.minimum)}};
  return j;
}

void overlay_config(const json& j, SolverConfig& c) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "variant") c.variant = v.get<int>();
    else if (k == "epsilon") c.epsilon = get_num(v);
    else if (k == "max_iter") c.max_iter = v.get<int>();
    else if (k == "delta1") c.step.delta1 = get_num(v);
    else if (k == "delta2") c.step.delta2 = get_num(v);
    else if (k == "rho") c.step.rho = get_num(v);
    else if (k == "backtrack") c.step.backtrack = get_num(v);
    else if (k == "alpha_min") c.step.alpha_min = get_num(v);
    else if (k == "interior_samples") c.step.interior_samples = v.get<int>();
    else if (k == "sigma_bar") c.sigma_bar = get_num(v);
    else if (k == "sigma_cap_override") {
      if (v.is_null()) c.sigma_cap_override.reset();
      else c.sigma_cap_override = get_num(v);
    } else if (k == "rhs_mode") {
      if (v.is_null()) c.rhs_mode.reset();
      else c.rhs_mode = rhs_mode_from_string(v.get<std::string>());
    } else if (k == "multiplier_start") {
      c.multiplier_start = multiplier_start_from(v.get<std::string>());
    } else if (k == "regularization") {
      if (!v.is_object()) throw ParseError("regularization must be an object");
      RegularizationPolicy& r = c.regularization;
      for (auto jt = v.begin(); jt != v.end(); ++jt) {
        const std::string& rk = jt.key();
        if (rk == "initial") r.initial = get_num(*jt);
        else if (rk == "growth") r.growth = get_num(*jt);
        else if (rk == "max") r.max = get_num(*jt);
        else if (rk == "min_rcond") r.min_rcond = get_num(*jt);
        else if (rk == "curvature_correction") r.curvature_correction = jt->get<bool>();
        else if (rk == "descent_fallback") r.descent_fallback = jt->get<bool>();
        else if (rk == "minimum") r.minimum = get_num(*jt);
        else throw ParseError("unknown regularization key '" + rk + "'");
      }
    } else {
      throw ParseError("unknown config key '" + k + "'");
    }
  }
}

json record_json(const IterationRecord& r) {
  const StepBreakdown& s = r.step;
  return {{"k", r.k},
          {"phi", num(r.phi)},
          {"mu", num(r.mu)},
          {"sigma", num(r.sigma)},
          {"alpha_tilde", num(s.alpha_tilde)},
          {"alpha_bar", num(s.alpha_bar)},
          {"alpha_check", num(s.alpha_check)},
          {"alpha_hat", num(s.alpha_hat)},
          {"alpha", num(s.alpha_k)},
          {"backtracks", s.backtrack_count},
          {"trials", s.trial_evaluations},
          {"lambda", num(r.lambda)},
          {"rcond", num(r.rcond)},
          {"factorizations", r.factorizations},
          {"kkt_solves", r.kkt_solves},
          {"ls_solves", r.ls_solves},
          {"phi_next", num(r.phi_next)},
          {"margin_next", num(r.margin_next)},
          {"third_order_fd", r.third_order_fd},
          {"seconds", num(r.seconds)}};
}

IterationRecord record_from(const json& j) {
  IterationRecord r;
  r.k = j.at("k").get<int>();
  r.phi = get_num(j.at("phi"));
  r.mu = get_num(j.at("mu"));
  r.sigma = get_num(j.at("sigma"));
  r.step.alpha_tilde = get_num(j.at("alpha_tilde"));
  r.step.alpha_bar = get_num(j.at("alpha_bar"));
  r.step.alpha_check = get_num(j.at("alpha_check"));
  r.step.alpha_hat = get_num(j.at("alpha_hat"));
  r.step.alpha_k = get_num(j.at("alpha"));
  r.step.backtrack_count = j.at("backtracks").get<int>();
  r.step.trial_evaluations = j.at("trials").get<int>();
  r.lambda = get_num(j.at("lambda"));
  r.rcond = get_num(j.at("rcond"));
  r.factorizations = j.at("factorizations").get<int>();
  r.kkt_solves = j.at("kkt_solves").get<long>();
  r.ls_solves = j.at("ls_solves").get<int>();
  r.phi_next = get_num(j.at("phi_next"));
  r.margin_next = get_num(j.at("margin_next"));
  r.third_order_fd = j.at("third_order_fd").get<bool>();
  r.seconds = get_num(j.at("seconds"));
  return r;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

std::string fmt(const char* spec, double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

SolveStatus solve_status_from_string(const std::string& s) {
  for (SolveStatus st : {SolveStatus::converged, SolveStatus::max_iter, SolveStatus::stalled,
                         SolveStatus::factorization_failed})
    if (s == to_string(st)) return st;
  throw ParseError("unknown status '" + s + "'");
}

RunArtifact RunArtifact::from_report(const SolveReport& rep, const SolverConfig& cfg) {
  RunArtifact a;
  a.problem = rep.problem;
  a.config = cfg;
  a.status = rep.status;
  a.objective = rep.objective;
  a.iterations = rep.iterations;
  a.seconds = rep.seconds;
  a.conv_phi = rep.final_phi;
  a.message = rep.message;
  a.x = rep.final_iterate.x;
  a.trace = rep.history;
  return a;
}

std::string to_json(const RunArtifact& a, int indent) {
  json j;
  j["schema"] = a.schema;
  j["problem"] = a.problem;
  j["variant"] = a.config.variant;
  j["config"] = config_json(a.config);
  j["status"] = to_string(a.status);
  j["objective"] = num(a.objective);
  j["iterations"] = a.iterations;
  j["seconds"] = num(a.seconds);
  j["conv_phi"] = num(a.conv_phi);
  j["message"] = a.message;
  j["x"] = vec_json(a.x);
  json tr = json::array();
  for (const auto& r : a.trace) tr.push_back(record_json(r));
  j["trace"] = std::move(tr);
  return j.dump(indent);
}

RunArtifact run_artifact_from_json(const std::string& text) {
  const json j = parse_text(text);
  try {
    RunArtifact a;
    a.schema = j.at("schema").get<std::string>();
    if (a.schema != kRunSchema) throw ParseError("unsupported schema '" + a.schema + "'");
    a.problem = j.at("problem").get<std::string>();
    overlay_config(j.at("config"), a.config);
    a.status = solve_status_from_string(j.at("status").get<std::string>());
    a.objective = get_num(j.at("objective"));
    a.iterations = j.at("iterations").get<int>();
    a.seconds = get_num(j.at("seconds"));
    a.conv_phi = get_num(j.at("conv_phi"));
    a.message = j.at("message").get<std::string>();
    a.x = vec_from(j.at("x"));
    for (const auto& r : j.at("trace")) a.trace.push_back(record_from(r));
    return a;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed run artifact: ") + e.what());
  }
}

std::string config_to_json(const SolverConfig& cfg, int indent) {
  return config_json(cfg).dump(indent);
}

SolverConfig config_from_json(const std::string& text, SolverConfig base) {
  const json j = parse_text(text);
  try {
    overlay_config(j, base);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  base.validate();
  return base;
}

double BenchRow::objective_delta() const {
  return (objective - ref_objective) / std::max(1.0, std::abs(ref_objective));
}

BenchRow BenchRow::from_report(const BenchmarkEntry& e, const SolveReport& rep,
                               const SolverConfig& cfg) {
  BenchRow r;
  r.prob = e.name;
  r.variant = cfg.variant;
  r.rhs = cfg.effective_rhs_mode();
  r.status = to_string(rep.status);
  r.objective = rep.objective;
  r.iterations = rep.iterations;
  r.seconds = rep.seconds;
  r.conv_phi = rep.final_phi;
  r.ref_objective = e.reference_objective;
  r.table = e.table;
  r.message = rep.message;
  return r;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "# schema=" << kBenchSchema << "\n";
  os << "Prob,Obj,Iter,Seconds,ConvPhi,Status,Variant,Rhs,RefObj,ObjDelta,RefIter,"
        "IterDelta,RefConvPhi,Message\n";
  for (const auto& r : rows) {
    os << r.prob << ',' << fmt("%.10g", r.objective) << ',' << r.iterations << ','
       << fmt("%.3f", r.seconds) << ',' << fmt("%.4e", r.conv_phi) << ','
       << r.status << ',' << r.variant << ',' << to_string(r.rhs) << ','
       << fmt("%.10g", r.ref_objective) << ',' << fmt("%.3e", r.objective_delta()) << ',';
    if (r.table)
      os << r.table->iterations << ',' << (r.iterations - r.table->iterations) << ','
         << fmt("%.4e", r.table->conv_phi);
    else
      os << ",,";
    os << ',' << csv_field(r.message) << '\n';
  }
  return os.str();
}

std::string bench_json(const std::vector<BenchRow>& rows, int indent) {
  json out;
  out["schema"] = kBenchSchema;
  json arr = json::array();
  for (const auto& r : rows) {
    json j = {{"Prob", r.prob},
              {"Obj", num(r.objective)},
              {"Iter", r.iterations},
              {"Seconds", num(r.seconds)},
              {"ConvPhi", num(r.conv_phi)},
              {"Status", r.status},
              {"Variant", r.variant},
              {"Rhs", to_string(r.rhs)},
              {"RefObj", num(r.ref_objective)},
              {"ObjDelta", num(r.objective_delta())},
              {"Message", r.message}};
    if (r.table) {
      j["RefIter"] = r.table->iterations;
      j["IterDelta"] = r.iterations - r.table->iterations;
      j["RefConvPhi"] = num(r.table->conv_phi);
    } else {
      j["RefIter"] = nullptr;
      j["IterDelta"] = nullptr;
      j["RefConvPhi"] = nullptr;
    }
    arr.push_back(std::move(j));
  }
  out["rows"] = std::move(arr);
  return out.dump(indent);
}

}  // namespace arcsearch
