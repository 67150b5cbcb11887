#include "arcsearch/stepsize.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "arcsearch/errors.hpp"

namespace arcsearch {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Smallest t > 0 with (kappa + 2 cddot) t^2 - 2 cdot t + kappa = 0, or +inf.
// Written as kappa / (cdot + sqrt(disc)) to avoid cancellation; this picks
// the smaller positive root for every sign of the leading coefficient.
double first_crossing(double kappa, double cdot, double cddot) {
  const double a = kappa + 2.0 * cddot;
  const double disc = cdot * cdot - a * kappa;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double denom = cdot + std::sqrt(disc);
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return kappa / denom;
}

void check_step_cfg(const StepConfig& cfg) {
  if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0))
    throw ContractViolation("backtrack factor must lie in (0, 1)");
  if (!(cfg.alpha_min > 0.0)) throw ContractViolation("alpha_min must be positive");
}

[[noreturn]] void stall(const char* which, double alpha, double gap) {
  std::ostringstream os;
  os << which << " backtracking stalled below alpha=" << alpha << " (gap " << gap << ")";
  throw StepStallError(os.str(), gap);
}

bool feasible_at(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                 const Vec& s_ref, double delta1, double alpha, double* gap) {
  const Vec gx = prob.g(eval_arc(v, arc, alpha).x);
  const Vec slack = gx - delta1 * s_ref;
  if (!slack.allFinite()) {
    *gap = std::numeric_limits<double>::infinity();
    return false;
  }
  *gap = -slack.minCoeff();
  return slack.minCoeff() >= 0.0;
}

struct TrialValues {
  double phi;
  double margin;
};

std::optional<TrialValues> measure(const NlpProblem& prob, const Iterate& cand,
                                   const NeighborhoodRef* ref) {
  try {
    const KktResidual res = residual(prob, cand);
    const double phi = merit(res);
    const double margin = ref ? neighborhood_margin(res, res.r_comp, *ref) : 0.0;
    if (!std::isfinite(phi) || !std::isfinite(margin)) return std::nullopt;
    return TrialValues{phi, margin};
  } catch (const EvaluationError&) {
    return std::nullopt;
  }
}

}  // namespace

double alpha_positivity(const Vec& c, const Vec& cdot, const Vec& cddot, double delta1) {
  if (c.size() != cdot.size() || c.size() != cddot.size())
    throw ContractViolation("alpha_positivity: dimension mismatch");
  if (!(delta1 >= 0.0 && delta1 < 1.0))
    throw ContractViolation("alpha_positivity: delta1 must lie in [0, 1)");
  double alpha = kHalfPi;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!(c(i) > 0.0)) throw ContractViolation("alpha_positivity: c must be positive");
    const double t = first_crossing((1.0 - delta1) * c(i), cdot(i), cddot(i));
    if (t < 1.0) alpha = std::min(alpha, 2.0 * std::atan(t));
  }
  return alpha;
}

double alpha_feasibility(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                         const Vec& s_ref, double delta1, double alpha_start,
                         const StepConfig& cfg, int* backtracks) {
  check_step_cfg(cfg);
  if (s_ref.size() != prob.p()) throw ContractViolation("s_ref has wrong dimension");
  if (!(alpha_start > 0.0 && alpha_start <= kHalfPi + 1e-15))
    throw ContractViolation("alpha_start must lie in (0, pi/2]");
  double alpha = std::min(alpha_start, kHalfPi);
  double gap = 0.0;
  while (alpha >= cfg.alpha_min) {
    bool ok = feasible_at(prob, v, arc, s_ref, delta1, alpha, &gap);
    for (int j = 1; ok && j <= cfg.interior_samples; ++j) {
      double sample_gap = 0.0;
      ok = feasible_at(prob, v, arc, s_ref, delta1,
                       alpha * j / (cfg.interior_samples + 1), &sample_gap);
      if (!ok) gap = sample_gap;
    }
    if (ok) return alpha;
    alpha *= cfg.backtrack;
    if (backtracks) ++*backtracks;
  }
  stall("feasibility", cfg.alpha_min, gap);
}

double alpha_merit(const NlpProblem& prob, const TrialFn& trial, double phi_current,
                   double rho, double sigma, double delta2, double alpha_start,
                   const StepConfig& cfg, int* backtracks) {
  check_step_cfg(cfg);
  if (!(rho > 0.0 && rho < 0.5)) throw ContractViolation("rho must lie in (0, 1/2)");
  if (!(alpha_start > 0.0)) throw ContractViolation("alpha_start must be positive");
  double alpha = std::min(alpha_start, kHalfPi);
  double gap = std::numeric_limits<double>::infinity();
  while (alpha >= cfg.alpha_min) {
    if (auto cand = trial(alpha)) {
      if (auto tv = measure(prob, *cand, nullptr)) {
        const double bound =
            phi_current * (1.0 - 2.0 * rho * (1.0 - sigma) * std::sin(alpha)) - delta2;
        gap = tv->phi - bound;
        if (gap <= 0.0) return alpha;
      }
    }
    alpha *= cfg.backtrack;
    if (backtracks) ++*backtracks;
  }
  stall("merit", cfg.alpha_min, gap);
}

double alpha_merit(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                   double phi_current, double rho, double sigma, double delta2,
                   double alpha_start, const StepConfig& cfg) {
  return alpha_merit(prob, arc_trial(v, arc), phi_current, rho, sigma, delta2,
                     alpha_start, cfg);
}

double alpha_neighborhood(const NlpProblem& prob, const TrialFn& trial,
                          const NeighborhoodRef& ref, double alpha_start,
                          const StepConfig& cfg, int* backtracks) {
  check_step_cfg(cfg);
  if (!(alpha_start > 0.0)) throw ContractViolation("alpha_start must be positive");
  double alpha = std::min(alpha_start, kHalfPi);
  double gap = std::numeric_limits<double>::infinity();
  while (alpha >= cfg.alpha_min) {
    if (auto cand = trial(alpha)) {
      if (auto tv = measure(prob, *cand, &ref)) {
        gap = -tv->margin;
        if (tv->margin >= 0.0) return alpha;
      }
    }
    alpha *= cfg.backtrack;
    if (backtracks) ++*backtracks;
  }
  stall("neighborhood", cfg.alpha_min, gap);
}

double alpha_neighborhood(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                          const NeighborhoodRef& ref, double alpha_start,
                          const StepConfig& cfg) {
  return alpha_neighborhood(prob, arc_trial(v, arc), ref, alpha_start, cfg);
}

TrialFn arc_trial(const Iterate& v, const ArcState& arc) {
  return [&v, &arc](double alpha) -> std::optional<Iterate> {
    return eval_arc(v, arc, alpha);
  };
}

StepBreakdown select_step(const NlpProblem& prob, const Iterate& v, const ArcState& arc,
                          const StepContext& ctx, const TrialFn& trial,
                          const StepConfig& cfg) {
  check_step_cfg(cfg);
  StepBreakdown out;

  out.alpha_tilde = alpha_positivity(v.w, arc.vdot.w, arc.vddot.w, cfg.delta1);
  if (ctx.slack_on_arc)
    out.alpha_tilde = std::min(
        out.alpha_tilde, alpha_positivity(v.s, arc.vdot.s, arc.vddot.s, cfg.delta1));
  if (!(out.alpha_tilde > 0.0)) stall("positivity", 0.0, 0.0);

  out.alpha_bar = alpha_feasibility(prob, v, arc, ctx.s_ref, cfg.delta1, out.alpha_tilde,
                                    cfg, &out.backtrack_count);

  // alpha_check: first backtracked angle meeting feasibility and merit.
  // alpha_hat: continue from there until the neighborhood margin also holds.
  const double slope = 2.0 * cfg.rho * (1.0 - arc.sigma);
  double alpha = out.alpha_bar;
  double gap = std::numeric_limits<double>::infinity();
  bool have_check = false;
  const char* failing = "merit";
  while (alpha >= cfg.alpha_min) {
    ++out.trial_evaluations;
    double fgap = 0.0;
    if (feasible_at(prob, v, arc, ctx.s_ref, cfg.delta1, alpha, &fgap)) {
      if (auto cand = trial(alpha)) {
        if (auto tv = measure(prob, *cand, &ctx.ref)) {
          const double bound = ctx.phi * (1.0 - slope * std::sin(alpha)) - cfg.delta2;
          const bool merit_ok = tv->phi <= bound;
          if (merit_ok && !have_check) {
            have_check = true;
            out.alpha_check = alpha;
          }
          if (merit_ok && tv->margin >= 0.0) {
            out.alpha_hat = alpha;
            out.alpha_k = std::min({out.alpha_tilde, out.alpha_bar, out.alpha_check,
                                    out.alpha_hat});
            return out;
          }
          gap = merit_ok ? -tv->margin : tv->phi - bound;
          failing = merit_ok ? "neighborhood" : "merit";
        }
      }
    } else {
      failing = "feasibility";
      gap = fgap;
    }
    alpha *= cfg.backtrack;
    ++out.backtrack_count;
  }
  stall(failing, cfg.alpha_min, gap);
}

}  // namespace arcsearch
