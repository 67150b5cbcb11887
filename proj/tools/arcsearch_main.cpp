// Command-line front end: solve, bench, trace, check, list.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arcsearch/errors.hpp"
#include "arcsearch/problems.hpp"
#include "arcsearch/report_io.hpp"
#include "arcsearch/runner.hpp"
#include "arcsearch/solver.hpp"

using namespace arcsearch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitInit = 2;
constexpr int kExitNoConv = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

struct SolverFlags {
  std::optional<int> variant;
  std::optional<double> eps;
  std::optional<int> max_iter;
  std::optional<double> sigma_bar;
  std::optional<double> delta1;
  std::optional<double> rho;
  std::optional<std::string> rhs;
  std::optional<std::string> multipliers;
  std::string config_path;

  void add(CLI::App* app) {
    app->add_option("--variant", variant, "Algorithm variant")->check(CLI::Range(1, 3));
    app->add_option("--eps", eps, "Merit tolerance (> 0)");
    app->add_option("--max-iter", max_iter, "Iteration limit")->check(CLI::NonNegativeNumber);
    app->add_option("--sigma-bar", sigma_bar, "Lower bound on the centering parameter");
    app->add_option("--delta1", delta1, "Fraction-to-boundary parameter");
    app->add_option("--rho", rho, "Merit decrease parameter");
    app->add_option("--rhs", rhs, "Second-order right-hand side")
        ->check(CLI::IsMember({"full", "third-free", "naive"}));
    app->add_option("--multipliers", multipliers, "Default w0: ones or gradient-scaled")
        ->check(CLI::IsMember({"ones", "gradient-scaled"}));
    app->add_option("--config", config_path,
                    "JSON config file (default: $ARCSEARCH_CONFIG when set)");
  }

  // Precedence: defaults < problem override < config file < flags.
  SolverConfig build(const BenchmarkEntry* e) const {
    SolverConfig cfg;
    if (e) cfg = config_for(*e, cfg);
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("ARCSEARCH_CONFIG")) path = env;
    }
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw ParseError("cannot open config file " + path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = config_from_json(ss.str(), cfg);
    }
    if (variant) cfg.variant = *variant;
    if (eps) cfg.epsilon = *eps;
    if (max_iter) cfg.max_iter = *max_iter;
    if (sigma_bar) cfg.sigma_bar = *sigma_bar;
    if (delta1) cfg.step.delta1 = *delta1;
    if (rho) cfg.step.rho = *rho;
    if (rhs) cfg.rhs_mode = rhs_mode_from_string(*rhs);
    if (multipliers)
      cfg.multiplier_start =
          *multipliers == "ones" ? MultiplierStart::ones : MultiplierStart::gradient_scaled;
    cfg.validate();
    return cfg;
  }
};

struct ProblemFlags {
  std::string name;
  std::string file;
  std::string start = "interior";
  std::vector<double> x0;

  void add(CLI::App* app) {
    app->add_option("problem", name, "Registered problem name, e.g. HS19");
    app->add_option("--file", file, "Load the problem from a .nlp file");
    app->add_option("--start", start, "Starting point: interior or standard")
        ->check(CLI::IsMember({"interior", "standard"}));
    app->add_option("--x0", x0, "Explicit starting point")->delimiter(',');
  }

  BenchmarkEntry entry() const {
    if (!file.empty() && !name.empty()) throw CLI::ValidationError("give a problem name or --file, not both");
    if (!file.empty()) return load_problem_file(file);
    if (name.empty()) throw CLI::ValidationError("problem name or --file is required");
    return get_problem(name);
  }

  Iterate start_point(const BenchmarkEntry& e) const {
    Iterate v0;
    if (!x0.empty()) {
      if (static_cast<int>(x0.size()) != e.problem->n())
        throw CLI::ValidationError("--x0 needs " + std::to_string(e.problem->n()) + " values");
      v0.x = Eigen::Map<const Vec>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    } else {
      v0.x = start == "standard" ? e.standard_start : e.interior_start;
    }
    return v0;
  }
};

void write_file(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string format_x(const Vec& x) {
  std::ostringstream os;
  os << '[';
  char buf[32];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.8g", x(i));
    os << (i ? ", " : "") << buf;
  }
  os << ']';
  return os.str();
}

void print_summary(const SolveReport& r) {
  std::printf("%-6s Obj %.10g  Iter %d  Seconds %.3f  ConvPhi %.4e  %s  x=%s\n",
              r.problem.c_str(), r.objective, r.iterations, r.seconds, r.final_phi,
              to_string(r.status), format_x(r.final_iterate.x).c_str());
  if (!r.message.empty()) std::printf("  %s\n", r.message.c_str());
}

int cmd_solve(const ProblemFlags& pf, const SolverFlags& sf, const std::string& json_path) {
  const BenchmarkEntry e = pf.entry();
  const SolverConfig cfg = sf.build(&e);
  const SolveReport rep = solve(*e.problem, pf.start_point(e), cfg);
  print_summary(rep);
  if (!json_path.empty()) write_file(json_path, to_json(RunArtifact::from_report(rep, cfg)) + "\n");
  return rep.status == SolveStatus::converged ? kExitOk : kExitNoConv;
}

int cmd_bench(const std::string& set, const SolverFlags& sf, bool compare, int jobs,
              const std::string& out, const std::string& format) {
  const auto names = bench_set(set);
  const SolverConfig base = sf.build(nullptr);
  std::vector<SolverConfig> configs;
  if (compare) {
    for (int v = 1; v <= 3; ++v) {
      SolverConfig c = base;
      c.variant = v;
      c.rhs_mode.reset();
      configs.push_back(c);
    }
    SolverConfig naive = base;
    naive.variant = 3;
    naive.rhs_mode = RhsMode::naive;
    configs.push_back(naive);
  } else {
    configs.push_back(base);
  }
  // An explicit --eps wins over per-problem tolerances.
  const auto rows = run_bench(names, configs, jobs, !sf.eps.has_value());
  write_file(out, format == "json" ? bench_json(rows) + "\n" : bench_csv(rows));
  for (const auto& r : rows)
    if (r.status != "Converged") return kExitNoConv;
  return kExitOk;
}

int cmd_trace(const ProblemFlags& pf, const SolverFlags& sf, int samples, const std::string& out) {
  const BenchmarkEntry e = pf.entry();
  const SolverConfig cfg = sf.build(&e);
  const TraceResult t = trace_run(*e.problem, pf.start_point(e), cfg, samples);
  write_file(out, trace_csv(t, e.problem->n()));
  if (!out.empty() && out != "-") print_summary(t.report);
  return t.report.status == SolveStatus::converged ? kExitOk : kExitNoConv;
}

// Wraps the objective so its gradient is off by `shift` in the first entry.
BenchmarkEntry with_gradient_fault(BenchmarkEntry e, double shift) {
  ScalarFunction f = e.problem->objective();
  auto grad = f.gradient;
  f.gradient = [grad, shift](const Vec& x) {
    Vec g = grad(x);
    g(0) += shift;
    return g;
  };
  e.problem = std::make_shared<NlpProblem>(e.problem->name(), e.problem->n(), f,
                                           e.problem->equalities(), e.problem->inequalities());
  return e;
}

int cmd_check(const ProblemFlags& pf, double tol, double tol_third, bool fault) {
  BenchmarkEntry e = pf.entry();
  if (fault) e = with_gradient_fault(std::move(e), 1e-2);
  const Iterate v0 = pf.start_point(e);
  const DerivativeReport rep = check_derivatives(*e.problem, v0.x, tol, tol_third);
  for (const auto& c : rep.entries) {
    std::printf("%-14s order %d  max_rel_err %.3e  %s", c.callback.c_str(), c.order,
                c.max_rel_error, c.passed ? "ok" : "FAIL");
    if (!c.passed) std::printf("  at (%d, %d)%s", c.worst_row, c.worst_col, c.finite ? "" : " non-finite");
    std::printf("\n");
  }
  std::printf("%s: derivative check %s\n", e.name.c_str(), rep.passed ? "passed" : "FAILED");
  return rep.passed ? kExitOk : kExitFail;
}

int cmd_list() {
  for (const auto& n : problem_names()) {
    try {
      const BenchmarkEntry e = get_problem(n);
      std::printf("%-6s n=%d m=%d p=%d  ref %.10g  %s\n", n.c_str(), e.problem->n(),
                  e.problem->m(), e.problem->p(), e.reference_objective, e.source.c_str());
    } catch (const LookupError&) {
      std::printf("%-6s (formulation file not found)\n", n.c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arc-search interior-point solver for smooth constrained problems"};
  app.require_subcommand(1);

  SolverFlags sf;
  ProblemFlags pf;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem");
  pf.add(solve_cmd);
  sf.add(solve_cmd);
  std::string json_path;
  solve_cmd->add_option("--json", json_path, "Write the run artifact as JSON");

  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark set");
  std::string set = "hs-subset";
  bool compare = false;
  int jobs = 1;
  std::string out, format = "csv";
  bench_cmd->add_option("set", set, "hs-subset, table, all, or a comma-separated list");
  sf.add(bench_cmd);
  bench_cmd->add_flag("--compare-variants", compare, "Run variants 1, 2, 3 and naive mode");
  bench_cmd->add_option("--jobs", jobs, "Problems solved in parallel")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", out, "Output path (default stdout)");
  bench_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* trace_cmd = app.add_subcommand("trace", "Sample the arcs of every iteration as CSV");
  pf.add(trace_cmd);
  sf.add(trace_cmd);
  int samples = 50;
  std::string trace_out;
  trace_cmd->add_option("--samples", samples, "Angles per iteration")->check(CLI::Range(2, 100000));
  trace_cmd->add_option("--out", trace_out, "Output path (default stdout)");

  auto* check_cmd = app.add_subcommand("check", "Compare derivatives with finite differences");
  pf.add(check_cmd);
  double tol = 1e-5, tol_third = 1e-4;
  bool fault = false;
  check_cmd->add_option("--tol", tol);
  check_cmd->add_option("--tol-third", tol_third);
  check_cmd->add_flag("--inject-gradient-fault", fault, "Perturb the objective gradient");

  app.add_subcommand("list", "List registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(pf, sf, json_path);
    if (*bench_cmd) return cmd_bench(set, sf, compare, jobs, out, format);
    if (*trace_cmd) return cmd_trace(pf, sf, samples, trace_out);
    if (*check_cmd) return cmd_check(pf, tol, tol_third, fault);
    return cmd_list();
  } catch (const InitializationError& e) {
    std::fprintf(stderr, "initialization error (%s): %s\n", e.component().c_str(), e.what());
    return kExitInit;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const LookupError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
}
