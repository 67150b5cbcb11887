#include "arcsearch/kkt.hpp"

#include "arcsearch/errors.hpp"

namespace arcsearch {

namespace {

void check_dims(const Iterate& v, int n, int m, int p) {
  if (v.x.size() != n || v.y.size() != m || v.w.size() != p ||
      v.s.size() != p || v.z.size() != p)
    throw ContractViolation("iterate dimensions do not match the problem");
}

void check_finite(const Vec& block, const char* name) {
  if (!block.allFinite())
    throw EvaluationError(name, std::string("residual block ") + name + " is not finite");
}

}  // namespace

Vec KktResidual::flat() const {
  Vec out(r_L.size() + r_h.size() + r_g.size() + r_wz.size() + r_comp.size());
  out << r_L, r_h, r_g, r_wz, r_comp;
  return out;
}

KktResidual residual(const PointEval& pe, const Iterate& v) {
  check_dims(v, static_cast<int>(pe.x.size()), static_cast<int>(pe.h.size()),
             static_cast<int>(pe.g.size()));
  KktResidual res;
  res.r_L = lagrangian_gradient(pe, v.y, v.w);
  res.r_h = pe.h;
  res.r_g = pe.g - v.s;
  res.r_wz = v.w - v.z;
  res.r_comp = v.z.cwiseProduct(v.s);
  check_finite(res.r_L, "r_L");
  check_finite(res.r_h, "r_h");
  check_finite(res.r_g, "r_g");
  check_finite(res.r_wz, "r_wz");
  check_finite(res.r_comp, "r_comp");
  return res;
}

KktResidual residual(const NlpProblem& prob, const Iterate& v) {
  check_dims(v, prob.n(), prob.m(), prob.p());
  return residual(PointEval::first_order(prob, v.x), v);
}

double merit(const KktResidual& res) {
  return res.r_L.squaredNorm() + res.r_h.squaredNorm() + res.r_g.squaredNorm() +
         res.r_wz.squaredNorm() + res.r_comp.squaredNorm();
}

double dual_measure(const Vec& z, const Vec& s) {
  if (z.size() != s.size() || z.size() < 1)
    throw ContractViolation("dual_measure needs matching non-empty z and s");
  return z.dot(s) / static_cast<double>(z.size());
}

KktMatrix jacobian(const PointEval& pe, const Iterate& v) {
  const Dims d = v.dims();
  check_dims(v, static_cast<int>(pe.x.size()), static_cast<int>(pe.h.size()),
             static_cast<int>(pe.g.size()));
  const int n = d.n, m = d.m, p = d.p;
  const int xo = d.x_offset(), yo = d.y_offset(), wo = d.w_offset(),
            so = d.s_offset(), zo = d.z_offset();

  KktMatrix K{d, Mat::Zero(d.total(), d.total())};
  Mat& A = K.matrix;
  // row block 1: stationarity
  A.block(xo, xo, n, n) = eval_lagrangian_hessian(pe, v.y, v.w);
  A.block(xo, yo, n, m) = -pe.jac_h;
  A.block(xo, wo, n, p) = -pe.jac_g;
  // row block 2: equalities
  A.block(yo, xo, m, n) = pe.jac_h.transpose();
  // row block 3: g(x) - s
  A.block(wo, xo, p, n) = pe.jac_g.transpose();
  A.block(wo, so, p, p).diagonal().setConstant(-1.0);
  // row block 4: w - z
  A.block(so, wo, p, p).diagonal().setConstant(1.0);
  A.block(so, zo, p, p).diagonal().setConstant(-1.0);
  // row block 5: Z s
  A.block(zo, so, p, p).diagonal() = v.z;
  A.block(zo, zo, p, p).diagonal() = v.s;
  return K;
}

KktMatrix jacobian(const NlpProblem& prob, const Iterate& v) {
  check_dims(v, prob.n(), prob.m(), prob.p());
  return jacobian(PointEval::at(prob, v.x), v);
}

NeighborhoodRef NeighborhoodRef::from_initial(const KktResidual& res0) {
  NeighborhoodRef ref{res0.r_comp.minCoeff(), merit(res0)};
  if (!(ref.min_comp0 > 0.0) || !(ref.phi0 > 0.0))
    throw ContractViolation("neighborhood reference needs min(Z0 s0) > 0 and phi0 > 0");
  return ref;
}

double neighborhood_margin(const KktResidual& res, const Vec& comp,
                           const NeighborhoodRef& ref) {
  if (!(ref.phi0 > 0.0)) throw ContractViolation("neighborhood reference has phi0 <= 0");
  return comp.minCoeff() - 0.5 * (ref.min_comp0 / ref.phi0) * merit(res);
}

}  // namespace arcsearch
