#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arcsearch/model.hpp"

namespace arcsearch {

/// Parsed contents of a `.nlp` problem file (see docs/nlp-format.md).
struct NlpSpec {
  struct Bound {
    int index = 0;  // 0-based
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
  };

  std::string name;
  int n = 0;
  std::string objective;
  std::vector<std::string> equalities;    // expr == 0
  std::vector<std::string> inequalities;  // expr >= 0
  std::vector<Bound> bounds;
  std::optional<Vec> start;
  std::optional<Vec> interior;
  std::optional<Vec> solution;
  std::optional<double> reference_objective;
};

/// Throws ParseError with the 1-based line number on malformed input.
NlpSpec parse_nlp(const std::string& text);
NlpSpec load_nlp_file(const std::string& path);

/// Compiles every expression symbolically; bounds become inequality rows.
NlpProblem build_problem(const NlpSpec& spec);

}  // namespace arcsearch
