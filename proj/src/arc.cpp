#include "arcsearch/arc.hpp"

#include <cmath>
#include <numbers>

#include "arcsearch/errors.hpp"

namespace arcsearch {

const char* to_string(RhsMode mode) {
  switch (mode) {
    case RhsMode::full: return "full";
    case RhsMode::third_free: return "third-free";
    case RhsMode::naive: return "naive";
  }
  return "?";
}

RhsMode rhs_mode_from_string(const std::string& s) {
  if (s == "full") return RhsMode::full;
  if (s == "third-free" || s == "third_free") return RhsMode::third_free;
  if (s == "naive") return RhsMode::naive;
  throw ContractViolation("unknown rhs mode '" + s + "'");
}

Vec first_order_rhs(const KktResidual& res, double sigma, double mu) {
  if (sigma < 0.0 || sigma >= 1.0) throw ContractViolation("sigma must lie in [0, 1)");
  if (mu < 0.0) throw ContractViolation("mu must be non-negative");
  KktResidual shifted = res;
  shifted.r_comp.array() -= sigma * mu;
  return shifted.flat();
}

Vec second_order_rhs(const NlpProblem& prob, const PointEval& pe, const Iterate& v,
                     const Iterate& vdot, RhsMode mode, bool* used_fd) {
  const Dims d = prob.dims();
  if (!(v.dims() == d) || !(vdot.dims() == d))
    throw ContractViolation("second_order_rhs: dimension mismatch");
  if (used_fd) *used_fd = false;

  Vec r_L = Vec::Zero(d.n);
  Vec r_h = Vec::Zero(d.m);
  Vec r_g = Vec::Zero(d.p);
  const Vec r_comp = -2.0 * vdot.z.cwiseProduct(vdot.s);

  if (mode != RhsMode::naive) {
    r_L = 2.0 * (contract_hess_g(pe, vdot.w, vdot.x) + contract_hess_h(pe, vdot.y, vdot.x));
    r_h = -quad_form_h(pe, vdot.x);
    r_g = -quad_form_g(pe, vdot.x);
  }
  if (mode == RhsMode::full) {
    const long fd_before = prob.stats().third_order_fd_calls.load();
    r_L -= d3_lagrangian_dir(prob, v.x, v.y, v.w, vdot.x);
    if (used_fd) *used_fd = prob.stats().third_order_fd_calls.load() != fd_before;
  }

  Vec out(d.total());
  out << r_L, r_h, r_g, Vec::Zero(d.p), r_comp;
  return out;
}

Vec second_order_rhs(const NlpProblem& prob, const Iterate& v, const Iterate& vdot,
                     RhsMode mode) {
  return second_order_rhs(prob, PointEval::at(prob, v.x), v, vdot, mode);
}

ArcState compute_arc(const NlpProblem& prob, const PointEval& pe, const Iterate& v,
                     const KktResidual& res, const KktFactorization& fac,
                     double sigma, RhsMode mode) {
  const Dims d = prob.dims();
  ArcState arc;
  arc.sigma = sigma;
  arc.mu = dual_measure(v.z, v.s);
  arc.rhs_mode = mode;
  arc.vdot = Iterate::unstack(fac.solve(first_order_rhs(res, sigma, arc.mu)), d);
  const Vec rhs2 = second_order_rhs(prob, pe, v, arc.vdot, mode, &arc.third_order_fd);
  arc.vddot = Iterate::unstack(fac.solve(rhs2), d);
  return arc;
}

Iterate eval_arc(const Iterate& v, const ArcState& arc, double alpha) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2 + 1e-15))
    throw ContractViolation("alpha must lie in [0, pi/2]");
  if (alpha == 0.0) return v;
  const double sn = std::sin(alpha);
  const double c1 = 1.0 - std::cos(alpha);
  auto step = [&](const Vec& base, const Vec& d1, const Vec& d2) -> Vec {
    return base - sn * d1 + c1 * d2;
  };
  return {step(v.x, arc.vdot.x, arc.vddot.x), step(v.y, arc.vdot.y, arc.vddot.y),
          step(v.w, arc.vdot.w, arc.vddot.w), step(v.s, arc.vdot.s, arc.vddot.s),
          step(v.z, arc.vdot.z, arc.vddot.z)};
}

double complementarity_along_arc(int i, const Iterate& v, const ArcState& arc,
                                 double alpha) {
  if (i < 0 || i >= v.z.size()) throw ContractViolation("index out of range");
  const double sn = std::sin(alpha);
  const double c1 = 1.0 - std::cos(alpha);
  const double zd = arc.vdot.z(i), sd = arc.vdot.s(i);
  const double zdd = arc.vddot.z(i), sdd = arc.vddot.s(i);
  return v.z(i) * v.s(i) * (1.0 - sn) + arc.sigma * arc.mu * sn -
         (zd * sdd + zdd * sd) * sn * c1 + (zdd * sdd - zd * sd) * c1 * c1;
}

}  // namespace arcsearch
