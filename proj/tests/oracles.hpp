#pragma once
// Test-side reference computations. Nothing here calls the solver's own
// residual, step-size or arc code.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "arcsearch/model.hpp"
#include "arcsearch/types.hpp"

namespace oracle {

using arcsearch::Iterate;
using arcsearch::Mat;
using arcsearch::NlpProblem;
using arcsearch::Vec;

using VecFn = std::function<Vec(const Vec&)>;

inline Mat fd_jacobian(const VecFn& F, const Vec& x, double rel = 1e-6) {
  const Vec f0 = F(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel * std::max(1.0, std::abs(x(j)));
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (F(xp) - F(xm)) / (2 * h);
  }
  return J;
}

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                       double rel = 1e-6) {
  return fd_jacobian([&](const Vec& y) { return Vec::Constant(1, f(y)); }, x, rel).row(0);
}

// k(v) written out block by block from the problem callbacks.
inline Vec kkt_residual(const NlpProblem& prob, const Iterate& v) {
  const int n = prob.n(), m = prob.m(), p = prob.p();
  Vec k(n + m + 3 * p);
  Vec rl = prob.grad_f(v.x);
  if (m) rl -= prob.jac_h(v.x) * v.y;
  if (p) rl -= prob.jac_g(v.x) * v.w;
  k.head(n) = rl;
  if (m) k.segment(n, m) = prob.h(v.x);
  if (p) {
    k.segment(n + m, p) = prob.g(v.x) - v.s;
    k.segment(n + m + p, p) = v.w - v.z;
    k.segment(n + m + 2 * p, p) = v.z.cwiseProduct(v.s);
  }
  return k;
}

inline Vec stack(const Iterate& v) {
  Vec out(v.x.size() + v.y.size() + v.w.size() + v.s.size() + v.z.size());
  out << v.x, v.y, v.w, v.s, v.z;
  return out;
}

inline Iterate unstack(const Vec& u, int n, int m, int p) {
  Iterate v;
  v.x = u.segment(0, n);
  v.y = u.segment(n, m);
  v.w = u.segment(n + m, p);
  v.s = u.segment(n + m + p, p);
  v.z = u.segment(n + m + 2 * p, p);
  return v;
}

// k'(v) by central differences of kkt_residual.
inline Mat fd_kkt_jacobian(const NlpProblem& prob, const Iterate& v) {
  const int n = prob.n(), m = prob.m(), p = prob.p();
  return fd_jacobian(
      [&](const Vec& u) { return kkt_residual(prob, unstack(u, n, m, p)); }, stack(v));
}

// Last grid point alpha_j = j * step (from 0) such that every component of
// c - cdot sin(a) + cddot (1 - cos(a)) stays >= delta1 c on the grid up to it.
inline double grid_positivity(const Vec& c, const Vec& cdot, const Vec& cddot, double delta1,
                              double step = 1e-5) {
  const double top = std::numbers::pi / 2;
  double last = 0.0;
  for (double a = step; a <= top + 1e-15; a += step) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double val = c(i) - cdot(i) * std::sin(a) + cddot(i) * (1 - std::cos(a));
      if (val < delta1 * c(i)) return last;
    }
    last = a;
  }
  return top;
}

// A random strictly interior primal-dual point: w = z, s = g(x) scaled.
inline Iterate random_iterate(const NlpProblem& prob, const Vec& x, std::mt19937& rng,
                              double spread = 0.3) {
  std::uniform_real_distribution<double> u(0.5, 2.0), d(-1.0, 1.0);
  Iterate v;
  v.x = x;
  v.y = Vec(prob.m());
  for (auto& e : v.y) e = d(rng);
  const Vec g = prob.g(x);
  v.w = Vec(prob.p());
  v.s = Vec(prob.p());
  for (int i = 0; i < prob.p(); ++i) {
    v.w(i) = u(rng);
    v.s(i) = std::max(g(i), 1e-3) * (1.0 + spread * d(rng));
  }
  v.z = v.w;
  return v;
}

}  // namespace oracle
