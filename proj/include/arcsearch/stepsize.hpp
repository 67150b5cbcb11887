#pragma once

#include <functional>
#include <optional>

#include "arcsearch/arc.hpp"
#include "arcsearch/kkt.hpp"
#include "arcsearch/model.hpp"

namespace arcsearch {

struct StepConfig {
  double delta1 = 0.01;
  double delta2 = 0.0;
  double rho = 0.25;
  double backtrack = 0.8;
  double alpha_min = 1e-12;
  int interior_samples = 8;
};

/// All angles in radians, each in (0, pi/2].
struct StepBreakdown {
  double alpha_tilde = 0.0;  // positivity of w (and s in the full-arc update)
  double alpha_bar = 0.0;    // g(x(alpha)) >= delta1 s
  double alpha_check = 0.0;  // merit decrease
  double alpha_hat = 0.0;    // neighborhood margin
  double alpha_k = 0.0;
  int backtrack_count = 0;
  int trial_evaluations = 0;
};

/// Candidate next iterate at a given angle; empty when it cannot be formed.
using TrialFn = std::function<std::optional<Iterate>(double)>;

/// Largest alpha <= pi/2 with c - cdot sin(a) + cddot (1 - cos(a)) >= delta1 c
/// for all a in [0, alpha], componentwise. Closed form via t = tan(alpha/2).
double alpha_positivity(const Vec& c, const Vec& cdot, const Vec& cddot, double delta1);

/// Backtracks from alpha_start until g(x(alpha)) >= delta1 s_ref at the
/// candidate and at `interior_samples` equispaced points of (0, alpha).
double alpha_feasibility(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                         const Vec& s_ref, double delta1, double alpha_start,
                         const StepConfig& cfg = {}, int* backtracks = nullptr);

/// Backtracks from alpha_start until
///   phi(trial(alpha)) <= phi (1 - 2 rho (1 - sigma) sin(alpha)) - delta2.
double alpha_merit(const NlpProblem& prob, const TrialFn& trial, double phi_current,
                   double rho, double sigma, double delta2, double alpha_start,
                   const StepConfig& cfg = {}, int* backtracks = nullptr);
double alpha_merit(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                   double phi_current, double rho, double sigma, double delta2,
                   double alpha_start, const StepConfig& cfg = {});

/// Backtracks from alpha_start until the neighborhood margin at the trial is >= 0.
double alpha_neighborhood(const NlpProblem& prob, const TrialFn& trial,
                          const NeighborhoodRef& ref, double alpha_start,
                          const StepConfig& cfg = {}, int* backtracks = nullptr);
double alpha_neighborhood(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                          const NeighborhoodRef& ref, double alpha_start,
                          const StepConfig& cfg = {});

/// Trial along the raw ellipse.
TrialFn arc_trial(const Iterate& v, const ArcState& arc);

struct StepContext {
  double phi = 0.0;
  NeighborhoodRef ref;
  Vec s_ref;                  // slack reference for the feasibility test
  bool slack_on_arc = false;  // include s in the positivity bound
};

/// Nested bounds: alpha_tilde, then alpha_bar from it, then alpha_check from
/// alpha_bar, then alpha_hat from alpha_check. alpha_hat is accepted only
/// where feasibility, merit decrease and the neighborhood margin hold jointly.
StepBreakdown select_step(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                          const StepContext& ctx, const TrialFn& trial,
                          const StepConfig& cfg = {});

}  // namespace arcsearch
