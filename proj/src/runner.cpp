#include "arcsearch/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "arcsearch/errors.hpp"
#include "arcsearch/kkt.hpp"

namespace arcsearch {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

BenchRow failed_row(const std::string& name, const SolverConfig& cfg, const char* status,
                    const std::string& why) {
  BenchRow r;
  r.prob = name;
  r.variant = cfg.variant;
  r.rhs = cfg.effective_rhs_mode();
  r.status = status;
  r.objective = r.conv_phi = std::numeric_limits<double>::quiet_NaN();
  r.message = why;
  return r;
}

std::vector<BenchRow> bench_one(const std::string& name,
                                const std::vector<SolverConfig>& configs, bool overrides) {
  std::vector<BenchRow> rows;
  BenchmarkEntry e;
  try {
    e = get_problem(name);
  } catch (const std::exception& ex) {
    for (const auto& c : configs) rows.push_back(failed_row(name, c, "Unavailable", ex.what()));
    return rows;
  }
  for (const auto& base : configs) {
    const SolverConfig cfg = overrides ? config_for(e, base) : base;
    Iterate v0;
    v0.x = e.interior_start;
    try {
      rows.push_back(BenchRow::from_report(e, solve(*e.problem, v0, cfg), cfg));
    } catch (const InitializationError& ex) {
      BenchRow r = failed_row(e.name, cfg, "InitFailed", ex.what());
      r.ref_objective = e.reference_objective;
      r.table = e.table;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

const std::vector<std::string>& subset_names() {
  static const std::vector<std::string> names = {"HS16", "HS17", "HS23", "HS32", "HS64",
                                                 "HS66", "HS71", "HS80", "HS108"};
  return names;
}

std::vector<std::string> bench_set(const std::string& set) {
  const std::string s = trim(set);
  if (s.empty()) throw ContractViolation("empty benchmark set");
  if (s == "hs-subset") return subset_names();
  if (s == "all" || s == "table") {
    std::vector<std::string> out;
    for (const auto& n : problem_names()) {
      if (s == "table" && !table_row(n)) continue;
      try {
        get_problem(n);
        out.push_back(n);
      } catch (const LookupError&) {
        // formulation file not bundled
      }
    }
    return out;
  }
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    get_problem(item);  // fail early on unknown names
    out.push_back(item);
  }
  if (out.empty()) throw ContractViolation("empty benchmark set");
  return out;
}

SolverConfig config_for(const BenchmarkEntry& e, SolverConfig base) {
  if (e.epsilon) base.epsilon = *e.epsilon;
  return base;
}

std::vector<BenchRow> run_bench(const std::vector<std::string>& names,
                                const std::vector<SolverConfig>& configs, int jobs,
                                bool problem_overrides) {
  for (const auto& c : configs) c.validate();
  std::vector<std::vector<BenchRow>> per(names.size());
  const int workers = std::clamp(jobs, 1, static_cast<int>(std::max<size_t>(names.size(), 1)));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < names.size(); i = next++)
      per[i] = bench_one(names[i], configs, problem_overrides);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::vector<BenchRow> rows;
  for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

TraceResult trace_run(const NlpProblem& prob, const Iterate& v0, const SolverConfig& cfg,
                      int samples) {
  if (samples < 2) throw ContractViolation("trace needs at least two samples");
  TraceResult out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto observer = [&](const Iterate& v, const IterationOutcome& it) {
    for (int j = 0; j < samples; ++j) {
      const double alpha = j * (std::numbers::pi / 2) / (samples - 1);
      Iterate c = eval_arc(v, it.arc, alpha);
      if (cfg.variant == 1) c.z = c.w;
      double phi = nan;
      try {
        phi = merit(residual(prob, c));
      } catch (const EvaluationError&) {
      }
      out.samples.push_back({it.record.k, alpha, std::move(c.x), phi});
    }
  };
  out.report = solve(prob, v0, cfg, observer);
  out.samples.push_back(
      {out.report.iterations, 0.0, out.report.final_iterate.x, out.report.final_phi});
  return out;
}

std::string trace_csv(const TraceResult& t, int n) {
  std::ostringstream os;
  os << "iter,alpha";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << ",phi\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  for (const auto& s : t.samples) {
    os << s.iter;
    put(s.alpha);
    for (int i = 0; i < n; ++i) put(s.x(i));
    put(s.phi);
    os << '\n';
  }
  return os.str();
}

}  // namespace arcsearch
