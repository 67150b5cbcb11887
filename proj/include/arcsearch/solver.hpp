#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arcsearch/arc.hpp"
#include "arcsearch/linsys.hpp"
#include "arcsearch/stepsize.hpp"

namespace arcsearch {

/// Default w0 = z0 when the caller supplies none: `ones` is e,
/// `gradient_scaled` is max(1, |grad f(x0)|_inf) e.
enum class MultiplierStart { ones, gradient_scaled };

struct SolverConfig {
  int variant = 3;
  double epsilon = 1e-8;
  int max_iter = 500;
  StepConfig step;
  double sigma_bar = 1e-3;
  std::optional<double> sigma_cap_override;
  RegularizationPolicy regularization;
  std::optional<RhsMode> rhs_mode;
  MultiplierStart multiplier_start = MultiplierStart::gradient_scaled;

  /// Throws ContractViolation on out-of-range fields.
  void validate() const;
  double variant_cap() const;
  RhsMode effective_rhs_mode() const;
};

struct IterationRecord {
  int k = 0;
  double phi = 0.0;       // at v^k
  double mu = 0.0;
  double sigma = 0.0;
  StepBreakdown step;
  double lambda = 0.0;
  double rcond = 0.0;
  int factorizations = 0;
  long kkt_solves = 0;
  int ls_solves = 0;
  double phi_next = 0.0;
  double margin_next = 0.0;  // neighborhood margin at v^{k+1}
  bool third_order_fd = false;
  double seconds = 0.0;
};

enum class SolveStatus { converged, max_iter, stalled, factorization_failed };
const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::max_iter;
  std::string problem;
  Iterate final_iterate;
  double final_phi = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::vector<IterationRecord> history;
  std::string message;
  /// Smallest eigenvalue of hess L at the final point (diagnostic only).
  double min_hessian_eigenvalue = 0.0;
  long third_order_calls = 0;
  NeighborhoodRef neighborhood;
};

/// Fills missing pieces of a starting point (y = 0, s = g(x), w = z per
/// `start`) and enforces z = w. Throws InitializationError on g(x) <= 0 or
/// non-positive w, s.
Iterate init_check(const NlpProblem& prob, const Iterate& v0,
                   MultiplierStart start = MultiplierStart::ones);

/// sigma = min(0.1, 0.99 cap), raised to min(sigma_bar, cap/2) when below
/// sigma_bar, with cap = min(variant cap, phi p / mu^2).
double select_sigma(double phi, double mu, int p, const SolverConfig& cfg);

struct WarmRestart {
  Vec y;
  Vec s;
  Vec z;
  bool rank_deficient = false;
};
WarmRestart warm_restart(const NlpProblem& prob, const Vec& x_next, const Vec& w_next);

struct IterationOutcome {
  Iterate next;
  ArcState arc;
  IterationRecord record;
};

IterationOutcome iterate_once(const NlpProblem& prob, const Iterate& v,
                              const NeighborhoodRef& ref, const SolverConfig& cfg,
                              int k = 0);

using IterationObserver =
    std::function<void(const Iterate& v, const IterationOutcome& out)>;

SolveReport solve(const NlpProblem& prob, const Iterate& v0, const SolverConfig& cfg = {},
                  const IterationObserver& observer = {});

}  // namespace arcsearch
