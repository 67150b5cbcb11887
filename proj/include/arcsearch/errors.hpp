#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace arcsearch {

/// Caller broke a precondition (wrong dimensions, out-of-range parameter).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A problem callback produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& block, const std::string& what)
      : std::runtime_error(what), block_(block) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

/// The KKT matrix stayed singular after the largest allowed regularization.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Backtracking fell below the step floor without meeting its test.
class StepStallError : public std::runtime_error {
 public:
  StepStallError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  /// Amount by which the last trial missed its acceptance test.
  double gap() const { return gap_; }

 private:
  double gap_;
};

/// The starting point is not strictly interior.
class InitializationError : public std::runtime_error {
 public:
  /// `component` names the offending entry, e.g. "g[3]" or "w[0]".
  InitializationError(const std::string& what, std::string component)
      : std::runtime_error(what), component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace arcsearch
