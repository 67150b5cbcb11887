#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arcsearch/model.hpp"

namespace arcsearch {

/// One row of the published benchmark table.
struct TableRow {
  std::string prob;  // HS number as printed, e.g. "19"
  double objective = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  double conv_phi = 0.0;
};

struct BenchmarkEntry {
  std::string name;
  std::shared_ptr<const NlpProblem> problem;
  Vec standard_start;
  Vec interior_start;   // g(x) > 0, checked at registration
  std::string start_note;
  double reference_objective = 0.0;
  std::optional<Vec> reference_solution;
  std::optional<TableRow> table;
  std::optional<double> epsilon;  // per-problem tolerance override
  std::string source;             // "builtin" or the .nlp path
};

/// Registered names, builtin ones first. File-backed names are listed even
/// when their `.nlp` file is missing; get_problem then throws LookupError.
std::vector<std::string> problem_names();

/// Accepts "HS19", "hs19" or "19". Throws LookupError listing the
/// available names.
BenchmarkEntry get_problem(const std::string& name);

/// Loads a `.nlp` file into an entry. The interior start falls back to the
/// standard start; the file must then be strictly feasible there.
BenchmarkEntry load_problem_file(const std::string& path);

/// Verbatim reference table (17 rows).
const std::vector<TableRow>& reference_table();
std::optional<TableRow> table_row(const std::string& name);

/// Directory searched for bundled `.nlp` files: $ARCSEARCH_DATA_DIR if set,
/// otherwise the compiled-in default.
std::string data_dir();

}  // namespace arcsearch
