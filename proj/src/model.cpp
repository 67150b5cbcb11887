#include "arcsearch/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "arcsearch/errors.hpp"

namespace arcsearch {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw ContractViolation(what);
}

bool all_finite(const Mat& m) { return m.allFinite(); }

std::string indexed(const char* base, int i) {
  std::ostringstream os;
  os << base << '[' << i << ']';
  return os.str();
}

}  // namespace

NlpProblem::NlpProblem(std::string name, int n, ScalarFunction objective,
                       std::vector<ScalarFunction> equalities,
                       std::vector<ScalarFunction> inequalities)
    : name_(std::move(name)),
      n_(n),
      objective_(std::move(objective)),
      eq_(std::move(equalities)),
      ineq_(std::move(inequalities)),
      stats_(std::make_shared<EvalStats>()) {
  require(n_ > 0, "problem needs n > 0");
  require(n_ > m(), "problem needs n > m");
  require(p() >= 1, "problem needs at least one inequality (p >= 1)");
  auto complete = [](const ScalarFunction& fn) {
    return fn.value && fn.gradient && fn.hessian;
  };
  require(complete(objective_), "objective is missing a callback");
  for (const auto& fn : eq_) require(complete(fn), "equality is missing a callback");
  for (const auto& fn : ineq_)
    require(complete(fn), "inequality is missing a callback");
}

void NlpProblem::check_x(const Vec& x) const {
  if (x.size() != n_) throw ContractViolation("x has wrong dimension");
}

double NlpProblem::f(const Vec& x) const {
  check_x(x);
  return objective_.value(x);
}

Vec NlpProblem::grad_f(const Vec& x) const {
  check_x(x);
  return objective_.gradient(x);
}

Mat NlpProblem::hess_f(const Vec& x) const {
  check_x(x);
  return objective_.hessian(x);
}

Vec NlpProblem::h(const Vec& x) const {
  check_x(x);
  Vec out(m());
  for (int i = 0; i < m(); ++i) out(i) = eq_[i].value(x);
  return out;
}

Mat NlpProblem::jac_h(const Vec& x) const {
  check_x(x);
  Mat out(n_, m());
  for (int i = 0; i < m(); ++i) out.col(i) = eq_[i].gradient(x);
  return out;
}

Mat NlpProblem::hess_h(int i, const Vec& x) const {
  check_x(x);
  require(i >= 0 && i < m(), "equality index out of range");
  return eq_[i].hessian(x);
}

Vec NlpProblem::g(const Vec& x) const {
  check_x(x);
  Vec out(p());
  for (int i = 0; i < p(); ++i) out(i) = ineq_[i].value(x);
  return out;
}

Mat NlpProblem::jac_g(const Vec& x) const {
  check_x(x);
  Mat out(n_, p());
  for (int i = 0; i < p(); ++i) out.col(i) = ineq_[i].gradient(x);
  return out;
}

Mat NlpProblem::hess_g(int i, const Vec& x) const {
  check_x(x);
  require(i >= 0 && i < p(), "inequality index out of range");
  return ineq_[i].hessian(x);
}

bool NlpProblem::has_third_order() const {
  if (!objective_.third) return false;
  for (const auto& fn : eq_)
    if (!fn.third) return false;
  for (const auto& fn : ineq_)
    if (!fn.third) return false;
  return true;
}

Vec NlpProblem::third_of(const ScalarFunction& fn, const Vec& x,
                         const Vec& d) const {
  check_x(x);
  if (d.size() != n_) throw ContractViolation("direction has wrong dimension");
  stats_->third_order_calls.fetch_add(1, std::memory_order_relaxed);
  if (fn.third) return fn.third(x, d);

  // Difference the Hessian along the unit direction, rescale by |d|^2.
  stats_->third_order_fd_calls.fetch_add(1, std::memory_order_relaxed);
  const double dn = d.norm();
  if (dn == 0.0) return Vec::Zero(n_);
  const Vec u = d / dn;
  const double t = 1e-4 * std::max(1.0, x.norm());
  const Mat diff = fn.hessian(x + t * u) - fn.hessian(x - t * u);
  return (dn * dn / (2.0 * t)) * (diff * u);
}

Vec NlpProblem::d3f(const Vec& x, const Vec& d) const {
  return third_of(objective_, x, d);
}

Vec NlpProblem::d3h(int i, const Vec& x, const Vec& d) const {
  require(i >= 0 && i < m(), "equality index out of range");
  return third_of(eq_[i], x, d);
}

Vec NlpProblem::d3g(int i, const Vec& x, const Vec& d) const {
  require(i >= 0 && i < p(), "inequality index out of range");
  return third_of(ineq_[i], x, d);
}

ProblemBuilder::ProblemBuilder(std::string name, int n)
    : name_(std::move(name)), n_(n) {}

ProblemBuilder& ProblemBuilder::objective(ScalarFunction fn) {
  objective_ = std::move(fn);
  return *this;
}

ProblemBuilder& ProblemBuilder::equality(ScalarFunction fn) {
  eq_.push_back(std::move(fn));
  return *this;
}

ProblemBuilder& ProblemBuilder::inequality(ScalarFunction fn) {
  ineq_.push_back(std::move(fn));
  return *this;
}

ProblemBuilder& ProblemBuilder::lower_bound(int i, double lo) {
  require(i >= 0 && i < n_, "bound index out of range");
  bounds_.push_back({i, lo, true});
  return *this;
}

ProblemBuilder& ProblemBuilder::upper_bound(int i, double hi) {
  require(i >= 0 && i < n_, "bound index out of range");
  bounds_.push_back({i, hi, false});
  return *this;
}

ProblemBuilder& ProblemBuilder::bounds(int i, double lo, double hi) {
  require(lo < hi, "empty bound interval");
  lower_bound(i, lo);
  return upper_bound(i, hi);
}

NlpProblem ProblemBuilder::build() const {
  std::vector<ScalarFunction> ineq = ineq_;
  for (const Bound& b : bounds_) {
    Vec coef = Vec::Zero(n_);
    coef(b.index) = b.lower ? 1.0 : -1.0;
    ineq.push_back(linear_function(coef, b.lower ? -b.value : b.value));
  }
  return NlpProblem(name_, n_, objective_, eq_, std::move(ineq));
}

ScalarFunction linear_function(Vec b, double c) {
  const auto n = b.size();
  ScalarFunction fn;
  fn.value = [b, c](const Vec& x) { return c + b.dot(x); };
  fn.gradient = [b](const Vec&) { return b; };
  fn.hessian = [n](const Vec&) { return Mat::Zero(n, n).eval(); };
  fn.third = [n](const Vec&, const Vec&) { return Vec::Zero(n).eval(); };
  return fn;
}

ScalarFunction quadratic_function(Mat Q, Vec b, double c) {
  require(Q.rows() == Q.cols() && Q.rows() == b.size(),
          "quadratic_function: inconsistent sizes");
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() == 0.0,
          "quadratic_function: Q must be symmetric");
  const auto n = b.size();
  ScalarFunction fn;
  fn.value = [Q, b, c](const Vec& x) { return c + b.dot(x) + 0.5 * x.dot(Q * x); };
  fn.gradient = [Q, b](const Vec& x) { return (b + Q * x).eval(); };
  fn.hessian = [Q](const Vec&) { return Q; };
  fn.third = [n](const Vec&, const Vec&) { return Vec::Zero(n).eval(); };
  return fn;
}

PointEval PointEval::first_order(const NlpProblem& prob, const Vec& x) {
  PointEval pe;
  pe.x = x;
  pe.f = prob.f(x);
  if (!std::isfinite(pe.f)) throw EvaluationError("f", "objective is not finite");
  pe.grad_f = prob.grad_f(x);
  if (!pe.grad_f.allFinite())
    throw EvaluationError("grad_f", "objective gradient is not finite");
  pe.h = prob.h(x);
  if (!pe.h.allFinite()) throw EvaluationError("h", "h(x) is not finite");
  pe.jac_h = prob.jac_h(x);
  if (!all_finite(pe.jac_h)) throw EvaluationError("jac_h", "grad h(x) is not finite");
  pe.g = prob.g(x);
  if (!pe.g.allFinite()) throw EvaluationError("g", "g(x) is not finite");
  pe.jac_g = prob.jac_g(x);
  if (!all_finite(pe.jac_g)) throw EvaluationError("jac_g", "grad g(x) is not finite");
  return pe;
}

PointEval PointEval::at(const NlpProblem& prob, const Vec& x) {
  PointEval pe = first_order(prob, x);
  pe.hess_f = prob.hess_f(x);
  if (!all_finite(pe.hess_f)) throw EvaluationError("hess_f", "hess f is not finite");
  pe.hess_h.reserve(prob.m());
  for (int i = 0; i < prob.m(); ++i) {
    pe.hess_h.push_back(prob.hess_h(i, x));
    if (!all_finite(pe.hess_h.back()))
      throw EvaluationError(indexed("hess_h", i), "hess h_i is not finite");
  }
  pe.hess_g.reserve(prob.p());
  for (int i = 0; i < prob.p(); ++i) {
    pe.hess_g.push_back(prob.hess_g(i, x));
    if (!all_finite(pe.hess_g.back()))
      throw EvaluationError(indexed("hess_g", i), "hess g_i is not finite");
  }
  return pe;
}

Vec lagrangian_gradient(const PointEval& pe, const Vec& y, const Vec& w) {
  require(y.size() == pe.jac_h.cols() && w.size() == pe.jac_g.cols(),
          "lagrangian_gradient: multiplier dimension mismatch");
  return pe.grad_f - pe.jac_h * y - pe.jac_g * w;
}

Mat eval_lagrangian_hessian(const PointEval& pe, const Vec& y, const Vec& w) {
  require(static_cast<std::size_t>(y.size()) == pe.hess_h.size() &&
              static_cast<std::size_t>(w.size()) == pe.hess_g.size(),
          "eval_lagrangian_hessian: multiplier dimension mismatch");
  Mat H = pe.hess_f;
  for (int i = 0; i < y.size(); ++i)
    if (y(i) != 0.0) H -= y(i) * pe.hess_h[i];
  for (int i = 0; i < w.size(); ++i)
    if (w(i) != 0.0) H -= w(i) * pe.hess_g[i];
  return H;
}

Mat eval_lagrangian_hessian(const NlpProblem& prob, const Vec& x, const Vec& y,
                            const Vec& w) {
  require(y.size() == prob.m() && w.size() == prob.p(),
          "eval_lagrangian_hessian: multiplier dimension mismatch");
  return eval_lagrangian_hessian(PointEval::at(prob, x), y, w);
}

Vec d3_lagrangian_dir(const NlpProblem& prob, const Vec& x, const Vec& y,
                      const Vec& w, const Vec& d) {
  require(y.size() == prob.m() && w.size() == prob.p(),
          "d3_lagrangian_dir: multiplier dimension mismatch");
  Vec out = prob.d3f(x, d);
  for (int i = 0; i < prob.m(); ++i) out -= y(i) * prob.d3h(i, x, d);
  for (int i = 0; i < prob.p(); ++i) out -= w(i) * prob.d3g(i, x, d);
  return out;
}

Vec contract_hess_h(const PointEval& pe, const Vec& ydot, const Vec& xdot) {
  require(static_cast<std::size_t>(ydot.size()) == pe.hess_h.size() &&
              xdot.size() == pe.x.size(),
          "contract_hess_h: dimension mismatch");
  Vec out = Vec::Zero(pe.x.size());
  for (int i = 0; i < ydot.size(); ++i)
    if (ydot(i) != 0.0) out += ydot(i) * (pe.hess_h[i] * xdot);
  return out;
}

Vec contract_hess_h(const NlpProblem& prob, const Vec& x, const Vec& ydot,
                    const Vec& xdot) {
  return contract_hess_h(PointEval::at(prob, x), ydot, xdot);
}

Vec contract_hess_g(const PointEval& pe, const Vec& wdot, const Vec& xdot) {
  require(static_cast<std::size_t>(wdot.size()) == pe.hess_g.size() &&
              xdot.size() == pe.x.size(),
          "contract_hess_g: dimension mismatch");
  Vec out = Vec::Zero(pe.x.size());
  for (int i = 0; i < wdot.size(); ++i)
    if (wdot(i) != 0.0) out += wdot(i) * (pe.hess_g[i] * xdot);
  return out;
}

Vec contract_hess_g(const NlpProblem& prob, const Vec& x, const Vec& wdot,
                    const Vec& xdot) {
  return contract_hess_g(PointEval::at(prob, x), wdot, xdot);
}

Vec quad_form_h(const PointEval& pe, const Vec& xdot) {
  require(xdot.size() == pe.x.size(), "quad_form_h: dimension mismatch");
  Vec out(pe.hess_h.size());
  for (std::size_t i = 0; i < pe.hess_h.size(); ++i)
    out(i) = xdot.dot(pe.hess_h[i] * xdot);
  return out;
}

Vec quad_form_h(const NlpProblem& prob, const Vec& x, const Vec& xdot) {
  return quad_form_h(PointEval::at(prob, x), xdot);
}

Vec quad_form_g(const PointEval& pe, const Vec& xdot) {
  require(xdot.size() == pe.x.size(), "quad_form_g: dimension mismatch");
  Vec out(pe.hess_g.size());
  for (std::size_t i = 0; i < pe.hess_g.size(); ++i)
    out(i) = xdot.dot(pe.hess_g[i] * xdot);
  return out;
}

Vec quad_form_g(const NlpProblem& prob, const Vec& x, const Vec& xdot) {
  return quad_form_g(PointEval::at(prob, x), xdot);
}

const DerivativeCheckEntry* DerivativeReport::worst() const {
  const DerivativeCheckEntry* out = nullptr;
  for (const auto& e : entries) {
    if (!e.finite) return &e;
    if (!out || e.max_rel_error > out->max_rel_error) out = &e;
  }
  return out;
}

namespace {

// Records the worst |analytic - fd| / max(1, |fd|) over a matrix pair.
void compare(const Mat& analytic, const Mat& fd, DerivativeCheckEntry& e) {
  if (!analytic.allFinite() || !fd.allFinite()) {
    e.finite = false;
    e.max_rel_error = std::numeric_limits<double>::infinity();
    return;
  }
  for (Eigen::Index c = 0; c < analytic.cols(); ++c)
    for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
      const double err =
          std::abs(analytic(r, c) - fd(r, c)) / std::max(1.0, std::abs(fd(r, c)));
      if (err > e.max_rel_error) {
        e.max_rel_error = err;
        e.worst_row = static_cast<int>(r);
        e.worst_col = static_cast<int>(c);
      }
    }
}

double fd_step(double xi) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) *
         std::max(1.0, std::abs(xi));
}

void check_function(const ScalarFunction& fn, const std::string& label,
                    const Vec& x, const Vec& dir, double tol, double tol_third,
                    DerivativeReport& report) {
  const auto n = x.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // gradient vs differences of the value
  {
    DerivativeCheckEntry e{"grad" + label, 1};
    Mat fd(n, 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double hstep = fd_step(x(j));
      Vec xp = x, xm = x;
      xp(j) += hstep;
      xm(j) -= hstep;
      fd(j, 0) = (fn.value(xp) - fn.value(xm)) / (2.0 * hstep);
    }
    Vec ga = fn.gradient(x);
    if (ga.size() != n) ga = Vec::Constant(n, nan);
    compare(ga, fd, e);
    e.passed = e.finite && e.max_rel_error <= tol;
    report.entries.push_back(e);
  }

  // Hessian vs differences of the gradient, plus symmetry
  {
    DerivativeCheckEntry e{"hess" + label, 2};
    Mat fd(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double hstep = fd_step(x(j));
      Vec xp = x, xm = x;
      xp(j) += hstep;
      xm(j) -= hstep;
      fd.col(j) = (fn.gradient(xp) - fn.gradient(xm)) / (2.0 * hstep);
    }
    const Mat H = fn.hessian(x);
    compare(H, fd, e);
    bool symmetric = true;
    if (H.allFinite()) {
      const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
      symmetric = (H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
    }
    e.passed = e.finite && symmetric && e.max_rel_error <= tol;
    if (!symmetric) e.callback += " (asymmetric)";
    report.entries.push_back(e);
  }

  if (fn.third) {
    DerivativeCheckEntry e{"d3" + label, 3};
    const double t = std::cbrt(std::numeric_limits<double>::epsilon()) *
                     std::max(1.0, x.norm());
    const Mat fd = (fn.hessian(x + t * dir) - fn.hessian(x - t * dir)) * dir / (2.0 * t);
    compare(fn.third(x, dir), fd, e);
    e.passed = e.finite && e.max_rel_error <= tol_third;
    report.entries.push_back(e);
  }
}

}  // namespace

DerivativeReport check_derivatives(const NlpProblem& prob, const Vec& x,
                                   double tol, double tol_third) {
  if (x.size() != prob.n()) throw ContractViolation("x has wrong dimension");
  DerivativeReport report;

  // Fixed, mildly irregular unit direction for the third-order check.
  Vec dir(prob.n());
  for (int i = 0; i < prob.n(); ++i)
    dir(i) = (i % 2 == 0 ? 1.0 : -0.7) / (1.0 + 0.5 * i);
  dir.normalize();

  auto guarded = [&](const ScalarFunction& fn, const std::string& label) {
    try {
      check_function(fn, label, x, dir, tol, tol_third, report);
    } catch (const std::exception&) {
      DerivativeCheckEntry e{"eval" + label, 0};
      e.finite = false;
      e.passed = false;
      e.max_rel_error = std::numeric_limits<double>::infinity();
      report.entries.push_back(e);
    }
  };

  guarded(prob.objective(), "_f");
  for (int i = 0; i < prob.m(); ++i)
    guarded(prob.equalities()[i], indexed("_h", i));
  for (int i = 0; i < prob.p(); ++i)
    guarded(prob.inequalities()[i], indexed("_g", i));

  for (const auto& e : report.entries) report.passed = report.passed && e.passed;
  return report;
}

}  // namespace arcsearch
