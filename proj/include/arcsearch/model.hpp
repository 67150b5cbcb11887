#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arcsearch/types.hpp"

namespace arcsearch {

/// One smooth scalar function of x with derivatives through third order.
///
/// `third(x, d)` returns the twice-contracted third-derivative tensor,
/// component j being sum_{k,l} d^3 phi / dx_j dx_k dx_l * d_k * d_l. It may be
/// left empty, in which case the problem falls back to differencing the
/// Hessian along d.
struct ScalarFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  std::function<Vec(const Vec&, const Vec&)> third;
};

/// Instrumentation shared by copies of a problem. Counts are advisory and
/// relaxed-atomic, so concurrent evaluation stays safe.
struct EvalStats {
  std::atomic<long> third_order_calls{0};
  std::atomic<long> third_order_fd_calls{0};
};

/// min f(x)  s.t.  h(x) = 0,  g(x) >= 0.
///
/// Immutable after construction. Jacobians are stored column-per-constraint
/// (n x m and n x p), matching grad h = [grad h_1, ..., grad h_m].
class NlpProblem {
 public:
  NlpProblem(std::string name, int n, ScalarFunction objective,
             std::vector<ScalarFunction> equalities,
             std::vector<ScalarFunction> inequalities);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int m() const { return static_cast<int>(eq_.size()); }
  int p() const { return static_cast<int>(ineq_.size()); }
  Dims dims() const { return {n(), m(), p()}; }

  double f(const Vec& x) const;
  Vec grad_f(const Vec& x) const;
  Mat hess_f(const Vec& x) const;

  Vec h(const Vec& x) const;
  Mat jac_h(const Vec& x) const;
  Mat hess_h(int i, const Vec& x) const;

  Vec g(const Vec& x) const;
  Mat jac_g(const Vec& x) const;
  Mat hess_g(int i, const Vec& x) const;

  /// True when every function carries an analytic third-order oracle.
  bool has_third_order() const;

  Vec d3f(const Vec& x, const Vec& d) const;
  Vec d3h(int i, const Vec& x, const Vec& d) const;
  Vec d3g(int i, const Vec& x, const Vec& d) const;

  const ScalarFunction& objective() const { return objective_; }
  const std::vector<ScalarFunction>& equalities() const { return eq_; }
  const std::vector<ScalarFunction>& inequalities() const { return ineq_; }

  EvalStats& stats() const { return *stats_; }

 private:
  Vec third_of(const ScalarFunction& fn, const Vec& x, const Vec& d) const;
  void check_x(const Vec& x) const;

  std::string name_;
  int n_;
  ScalarFunction objective_;
  std::vector<ScalarFunction> eq_;
  std::vector<ScalarFunction> ineq_;
  std::shared_ptr<EvalStats> stats_;
};

/// Assembles an NlpProblem; simple bounds become inequality rows
/// (x_i - l_i >= 0, u_i - x_i >= 0), appended per variable after the
/// general inequalities.
class ProblemBuilder {
 public:
  ProblemBuilder(std::string name, int n);

  ProblemBuilder& objective(ScalarFunction fn);
  ProblemBuilder& equality(ScalarFunction fn);
  ProblemBuilder& inequality(ScalarFunction fn);
  ProblemBuilder& lower_bound(int i, double lo);
  ProblemBuilder& upper_bound(int i, double hi);
  ProblemBuilder& bounds(int i, double lo, double hi);

  NlpProblem build() const;

 private:
  struct Bound {
    int index;
    double value;
    bool lower;
  };
  std::string name_;
  int n_;
  ScalarFunction objective_;
  std::vector<ScalarFunction> eq_;
  std::vector<ScalarFunction> ineq_;
  std::vector<Bound> bounds_;
};

/// Building blocks for hand-coded problems.
ScalarFunction linear_function(Vec b, double c);
/// c + b'x + 1/2 x'Qx; Q must be symmetric.
ScalarFunction quadratic_function(Mat Q, Vec b, double c);

/// Every callback evaluated once at x. The Hessians computed for the
/// Lagrangian are reused by the second-order right-hand sides.
struct PointEval {
  Vec x;
  double f = 0.0;
  Vec grad_f;
  Mat hess_f;
  Vec h;
  Mat jac_h;
  std::vector<Mat> hess_h;
  Vec g;
  Mat jac_g;
  std::vector<Mat> hess_g;

  /// Throws EvaluationError if any value is not finite.
  static PointEval at(const NlpProblem& prob, const Vec& x);
  /// Values and first derivatives only.
  static PointEval first_order(const NlpProblem& prob, const Vec& x);
};

/// grad f - grad h y - grad g w.
Vec lagrangian_gradient(const PointEval& pe, const Vec& y, const Vec& w);

/// hess f - sum y_i hess h_i - sum w_i hess g_i.
Mat eval_lagrangian_hessian(const PointEval& pe, const Vec& y, const Vec& w);
Mat eval_lagrangian_hessian(const NlpProblem& prob, const Vec& x, const Vec& y,
                            const Vec& w);

/// (d3 L) d d with the same multiplier signs as the Hessian.
Vec d3_lagrangian_dir(const NlpProblem& prob, const Vec& x, const Vec& y,
                      const Vec& w, const Vec& d);

/// sum_i ydot_i hess h_i(x) xdot.
Vec contract_hess_h(const PointEval& pe, const Vec& ydot, const Vec& xdot);
Vec contract_hess_h(const NlpProblem& prob, const Vec& x, const Vec& ydot,
                    const Vec& xdot);
/// sum_i wdot_i hess g_i(x) xdot, i = 1..p.
Vec contract_hess_g(const PointEval& pe, const Vec& wdot, const Vec& xdot);
Vec contract_hess_g(const NlpProblem& prob, const Vec& x, const Vec& wdot,
                    const Vec& xdot);

/// Components xdot' hess h_i(x) xdot.
Vec quad_form_h(const PointEval& pe, const Vec& xdot);
Vec quad_form_h(const NlpProblem& prob, const Vec& x, const Vec& xdot);
Vec quad_form_g(const PointEval& pe, const Vec& xdot);
Vec quad_form_g(const NlpProblem& prob, const Vec& x, const Vec& xdot);

struct DerivativeCheckEntry {
  std::string callback;  // e.g. "grad_f", "hess_g[2]", "d3h[0]"
  int order = 1;
  double max_rel_error = 0.0;
  int worst_row = -1;
  int worst_col = -1;
  bool finite = true;
  bool passed = true;
};

struct DerivativeReport {
  std::vector<DerivativeCheckEntry> entries;
  bool passed = true;

  const DerivativeCheckEntry* worst() const;
};

/// Compares analytic derivatives with central differences (step
/// cbrt(eps) * max(1, |x_i|)). Relative error is |a - fd| / max(1, |fd|).
/// Third-order oracles are checked against differences of the analytic
/// Hessian along a fixed direction and use `tol_third`.
DerivativeReport check_derivatives(const NlpProblem& prob, const Vec& x,
                                   double tol, double tol_third);

}  // namespace arcsearch
