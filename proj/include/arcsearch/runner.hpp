#pragma once

#include <string>
#include <vector>

#include "arcsearch/problems.hpp"
#include "arcsearch/report_io.hpp"
#include "arcsearch/solver.hpp"

namespace arcsearch {

/// Problems the default suite expects to converge to table accuracy.
const std::vector<std::string>& subset_names();

/// Resolves a benchmark set: "hs-subset", "table" (every table row with a
/// formulation), "all", or a comma-separated list of names. Throws
/// ContractViolation on an empty or unknown set.
std::vector<std::string> bench_set(const std::string& set);

/// `base` with the entry's tolerance override applied.
SolverConfig config_for(const BenchmarkEntry& e, SolverConfig base);

/// Solves every (problem, config) pair, problem-major. Failures land in the
/// row status; up to `jobs` problems run concurrently. Output order does not
/// depend on `jobs`. With `problem_overrides`, per-problem tolerances
/// replace the configured epsilon.
std::vector<BenchRow> run_bench(const std::vector<std::string>& names,
                                const std::vector<SolverConfig>& configs, int jobs = 1,
                                bool problem_overrides = true);

/// One sampled point x(alpha) of the arc at iterate `iter`.
struct TraceSample {
  int iter = 0;
  double alpha = 0.0;
  Vec x;
  double phi = 0.0;  // merit at the raw arc point; NaN if it cannot be evaluated
};

struct TraceResult {
  std::vector<TraceSample> samples;
  SolveReport report;
};

/// Solves while recording `samples` equally spaced angles on [0, pi/2] per
/// iteration, followed by one alpha = 0 row holding the final iterate.
TraceResult trace_run(const NlpProblem& prob, const Iterate& v0, const SolverConfig& cfg,
                      int samples = 50);

/// Columns iter, alpha, x1..xn, phi.
std::string trace_csv(const TraceResult& t, int n);

}  // namespace arcsearch
