#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arcsearch/problems.hpp"
#include "arcsearch/solver.hpp"

namespace arcsearch {

inline constexpr const char* kRunSchema = "arcsearch.run/1";
inline constexpr const char* kBenchSchema = "arcsearch.bench/1";

/// Machine-readable record of one solve.
struct RunArtifact {
  std::string schema = kRunSchema;
  std::string problem;
  SolverConfig config;
  SolveStatus status = SolveStatus::max_iter;
  double objective = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  double conv_phi = 0.0;
  std::string message;
  Vec x;
  std::vector<IterationRecord> trace;

  static RunArtifact from_report(const SolveReport& rep, const SolverConfig& cfg);
};

/// Doubles are written in shortest round-trip form; non-finite values as
/// the strings "nan", "inf", "-inf".
std::string to_json(const RunArtifact& a, int indent = 2);
/// Throws ParseError on malformed input or a schema mismatch.
RunArtifact run_artifact_from_json(const std::string& text);

std::string config_to_json(const SolverConfig& cfg, int indent = 2);
/// Overlays the keys present in `text` onto `base`. Unknown keys are
/// rejected with ParseError; the result is validated.
SolverConfig config_from_json(const std::string& text, SolverConfig base = {});

SolveStatus solve_status_from_string(const std::string& s);

struct BenchRow {
  std::string prob;
  int variant = 3;
  RhsMode rhs = RhsMode::third_free;
  /// A SolveStatus name, or "InitFailed" / "Unavailable" when no solve ran.
  std::string status;
  double objective = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  double conv_phi = 0.0;
  double ref_objective = 0.0;
  std::optional<TableRow> table;
  std::string message;

  /// (obj - ref) / max(1, |ref|).
  double objective_delta() const;

  static BenchRow from_report(const BenchmarkEntry& e, const SolveReport& rep,
                              const SolverConfig& cfg);
};

/// Header "Prob,Obj,Iter,Seconds,ConvPhi,..." preceded by a
/// "# schema=arcsearch.bench/1" line.
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows, int indent = 2);

}  // namespace arcsearch
