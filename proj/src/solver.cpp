#include "arcsearch/solver.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "arcsearch/errors.hpp"

namespace arcsearch {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Candidate for the warm-restart variants: (x, w) from the arc, the rest
// reset. Empty when g(x(alpha)) is not strictly positive.
std::optional<Iterate> restarted(const NlpProblem& prob, const Iterate& v,
                                 const ArcState& arc, double alpha, int* ls_solves) {
  Iterate cand = eval_arc(v, arc, alpha);
  const Vec gx = prob.g(cand.x);
  if (!gx.allFinite() || gx.minCoeff() <= 0.0) return std::nullopt;
  WarmRestart wr = warm_restart(prob, cand.x, cand.w);
  if (ls_solves && prob.m() > 0) ++*ls_solves;
  cand.y = std::move(wr.y);
  cand.s = std::move(wr.s);
  cand.z = std::move(wr.z);
  return cand;
}

}  // namespace

void SolverConfig::validate() const {
  if (variant < 1 || variant > 3) throw ContractViolation("variant must be 1, 2 or 3");
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
  if (max_iter < 0) throw ContractViolation("max_iter must be non-negative");
  if (!(step.rho > 0.0 && step.rho < 0.5)) throw ContractViolation("rho must lie in (0, 1/2)");
  if (!(step.delta1 > 0.0 && step.delta1 < 1.0))
    throw ContractViolation("delta1 must lie in (0, 1)");
  if (!(step.delta2 >= 0.0)) throw ContractViolation("delta2 must be non-negative");
  if (!(step.backtrack > 0.0 && step.backtrack < 1.0))
    throw ContractViolation("backtrack factor must lie in (0, 1)");
  if (sigma_cap_override && !(*sigma_cap_override > 0.0 && *sigma_cap_override < 1.0))
    throw ContractViolation("sigma cap must lie in (0, 1)");
  if (!(sigma_bar >= 0.0 && sigma_bar < variant_cap()))
    throw ContractViolation("sigma_bar must lie in [0, cap)");
}

double SolverConfig::variant_cap() const {
  if (sigma_cap_override) return *sigma_cap_override;
  return variant == 1 ? 0.5 : 0.125;
}

RhsMode SolverConfig::effective_rhs_mode() const {
  if (rhs_mode) return *rhs_mode;
  return variant == 3 ? RhsMode::third_free : RhsMode::full;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "Converged";
    case SolveStatus::max_iter: return "MaxIter";
    case SolveStatus::stalled: return "Stalled";
    case SolveStatus::factorization_failed: return "FactorizationFailed";
  }
  return "?";
}

Iterate init_check(const NlpProblem& prob, const Iterate& v0, MultiplierStart start) {
  const int n = prob.n(), m = prob.m(), p = prob.p();
  if (v0.x.size() != n) throw ContractViolation("x0 has wrong dimension");
  if (!v0.x.allFinite()) throw InitializationError("x0 is not finite", "x");
  Iterate v = v0;
  if (v.y.size() == 0) v.y = Vec::Zero(m);
  if (v.y.size() != m) throw ContractViolation("y0 has wrong dimension");

  const Vec gx = prob.g(v.x);
  for (int i = 0; i < p; ++i) {
    if (!(gx(i) > 0.0)) {
      std::ostringstream os;
      os << "g(x0) is not strictly positive: g[" << i << "] = " << gx(i);
      throw InitializationError(os.str(), "g[" + std::to_string(i) + "]");
    }
  }
  if (v.w.size() == 0 && v.z.size() == p) v.w = v.z;
  if (v.w.size() == 0) {
    double scale = 1.0;
    if (start == MultiplierStart::gradient_scaled && p > 0)
      scale = std::max(1.0, prob.grad_f(v.x).lpNorm<Eigen::Infinity>());
    v.w = Vec::Constant(p, scale);
  }
  if (v.s.size() == 0) v.s = gx;
  if (v.w.size() != p || v.s.size() != p) throw ContractViolation("w0/s0 have wrong dimension");
  for (int i = 0; i < p; ++i) {
    if (!(v.w(i) > 0.0))
      throw InitializationError("w0 must be strictly positive", "w[" + std::to_string(i) + "]");
    if (!(v.s(i) > 0.0))
      throw InitializationError("s0 must be strictly positive", "s[" + std::to_string(i) + "]");
  }
  v.z = v.w;
  return v;
}

double select_sigma(double phi, double mu, int p, const SolverConfig& cfg) {
  double cap = cfg.variant_cap();
  if (mu > 0.0) cap = std::min(cap, phi * p / (mu * mu));
  double sigma = std::min(0.1, 0.99 * cap);
  if (sigma < cfg.sigma_bar) sigma = std::min(cfg.sigma_bar, 0.5 * cap);
  return sigma;
}

WarmRestart warm_restart(const NlpProblem& prob, const Vec& x_next, const Vec& w_next) {
  WarmRestart out;
  out.s = prob.g(x_next);
  if (!out.s.allFinite() || out.s.minCoeff() <= 0.0)
    throw ContractViolation("warm_restart: g(x) must be strictly positive");
  out.z = w_next;
  if (prob.m() == 0) {
    out.y = Vec(0);
    return out;
  }
  const Vec r = prob.grad_f(x_next) - prob.jac_g(x_next) * w_next;
  LeastSquaresResult ls = least_squares_y(prob.jac_h(x_next), r);
  out.y = std::move(ls.y);
  out.rank_deficient = ls.rank_deficient;
  return out;
}

IterationOutcome iterate_once(const NlpProblem& prob, const Iterate& v,
                              const NeighborhoodRef& ref, const SolverConfig& cfg, int k) {
  const auto t0 = Clock::now();
  IterationOutcome out;
  IterationRecord& rec = out.record;
  rec.k = k;

  const PointEval pe = PointEval::at(prob, v.x);
  const KktResidual res = residual(pe, v);
  rec.phi = merit(res);
  rec.mu = dual_measure(v.z, v.s);
  rec.sigma = select_sigma(rec.phi, rec.mu, prob.p(), cfg);

  const KktMatrix K = jacobian(pe, v);
  const KktFactorization shifted = factorize(K, cfg.regularization);
  rec.factorizations = 1;
  out.arc = compute_arc(prob, pe, v, res, shifted, rec.sigma, cfg.effective_rhs_mode());
  const KktFactorization* fac = &shifted;

  // A curvature shift can turn vdot uphill for the merit. Fall back to the
  // unshifted system when the predicted decrease is too small.
  std::optional<KktFactorization> plain;
  if (shifted.lambda() > 0.0 && cfg.regularization.curvature_correction &&
      cfg.regularization.descent_fallback) {
    const double slope = res.flat().dot(K.matrix * out.arc.vdot.stacked());
    if (slope < 2.0 * cfg.step.rho * (1.0 - rec.sigma) * rec.phi) {
      RegularizationPolicy policy = cfg.regularization;
      policy.curvature_correction = false;
      plain.emplace(factorize(K, policy));
      fac = &*plain;
      rec.factorizations = 2;
      out.arc = compute_arc(prob, pe, v, res, *fac, rec.sigma, cfg.effective_rhs_mode());
    }
  }
  rec.lambda = fac->lambda();
  rec.rcond = fac->rcond();
  rec.kkt_solves = fac->solve_count();
  rec.third_order_fd = out.arc.third_order_fd;

  StepContext ctx;
  ctx.phi = rec.phi;
  ctx.ref = ref;
  TrialFn trial;
  if (cfg.variant == 1) {
    ctx.s_ref = v.s.cwiseMin(pe.g);
    ctx.slack_on_arc = true;
    trial = [&](double alpha) -> std::optional<Iterate> {
      Iterate c = eval_arc(v, out.arc, alpha);
      c.z = c.w;
      return c;
    };
  } else {
    ctx.s_ref = v.s;
    trial = [&](double alpha) { return restarted(prob, v, out.arc, alpha, nullptr); };
  }
  rec.step = select_step(prob, v, out.arc, ctx, trial, cfg.step);

  if (cfg.variant == 1) {
    out.next = eval_arc(v, out.arc, rec.step.alpha_k);
    out.next.z = out.next.w;
  } else {
    auto next = restarted(prob, v, out.arc, rec.step.alpha_k, &rec.ls_solves);
    if (!next) throw StepStallError("accepted step left the strict interior", 0.0);
    out.next = std::move(*next);
  }

  const KktResidual res_next = residual(prob, out.next);
  rec.phi_next = merit(res_next);
  rec.margin_next = neighborhood_margin(res_next, res_next.r_comp, ref);
  rec.seconds = since(t0);
  return out;
}

SolveReport solve(const NlpProblem& prob, const Iterate& v0, const SolverConfig& cfg,
                  const IterationObserver& observer) {
  cfg.validate();
  const auto t0 = Clock::now();
  const long third0 = prob.stats().third_order_calls.load();

  SolveReport rep;
  rep.problem = prob.name();
  Iterate v = init_check(prob, v0, cfg.multiplier_start);
  const KktResidual res0 = residual(prob, v);
  rep.neighborhood = NeighborhoodRef::from_initial(res0);
  double phi = merit(res0);

  int k = 0;
  for (;; ++k) {
    if (phi <= cfg.epsilon) {
      rep.status = SolveStatus::converged;
      break;
    }
    if (k >= cfg.max_iter) {
      rep.status = SolveStatus::max_iter;
      rep.message = "iteration limit reached";
      break;
    }
    try {
      IterationOutcome out = iterate_once(prob, v, rep.neighborhood, cfg, k);
      if (observer) observer(v, out);
      phi = out.record.phi_next;
      rep.history.push_back(out.record);
      v = std::move(out.next);
    } catch (const StepStallError& e) {
      rep.status = SolveStatus::stalled;
      rep.message = e.what();
      break;
    } catch (const EvaluationError& e) {
      rep.status = SolveStatus::stalled;
      rep.message = e.what();
      break;
    } catch (const FactorizationError& e) {
      rep.status = SolveStatus::factorization_failed;
      rep.message = e.what();
      break;
    }
  }

  rep.iterations = k;
  rep.final_iterate = v;
  rep.final_phi = phi;
  rep.objective = prob.f(v.x);
  try {
    const Mat H = eval_lagrangian_hessian(prob, v.x, v.y, v.w);
    rep.min_hessian_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Mat>(H, Eigen::EigenvaluesOnly).eigenvalues()(0);
  } catch (const EvaluationError&) {
    rep.min_hessian_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  }
  rep.third_order_calls = prob.stats().third_order_calls.load() - third0;
  rep.seconds = since(t0);
  return rep;
}

}  // namespace arcsearch
