#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "arcsearch/errors.hpp"
#include "arcsearch/model.hpp"
#include "arcsearch/problems.hpp"
#include "oracles.hpp"

using namespace arcsearch;

namespace {

// f = x1^3 x2 + sin(x2), with a third-order oracle.
ScalarFunction cubic() {
  ScalarFunction f;
  f.value = [](const Vec& x) { return x(0) * x(0) * x(0) * x(1) + std::sin(x(1)); };
  f.gradient = [](const Vec& x) {
    Vec g(2);
    g << 3 * x(0) * x(0) * x(1), x(0) * x(0) * x(0) + std::cos(x(1));
    return g;
  };
  f.hessian = [](const Vec& x) {
    Mat H(2, 2);
    H << 6 * x(0) * x(1), 3 * x(0) * x(0), 3 * x(0) * x(0), -std::sin(x(1));
    return H;
  };
  f.third = [](const Vec& x, const Vec& d) {
    // T_000 = 6 x2, T_001 = 6 x1, T_111 = -cos x2
    Vec r(2);
    r(0) = 6 * x(1) * d(0) * d(0) + 12 * x(0) * d(0) * d(1);
    r(1) = 6 * x(0) * d(0) * d(0) - std::cos(x(1)) * d(1) * d(1);
    return r;
  };
  return f;
}

NlpProblem small_problem(bool with_third = true) {
  ScalarFunction f = cubic();
  if (!with_third) f.third = nullptr;
  Vec b(2);
  b << 1.0, -2.0;
  return ProblemBuilder("small", 2)
      .objective(f)
      .equality(linear_function(b, 0.5))
      .inequality(cubic())
      .bounds(0, -1.0, 3.0)
      .lower_bound(1, 0.0)
      .build();
}

}  // namespace

TEST_CASE("builder appends bound rows in call order") {
  const NlpProblem p = small_problem();
  CHECK(p.n() == 2);
  CHECK(p.m() == 1);
  CHECK(p.p() == 4);
  Vec x(2);
  x << 0.5, 0.25;
  const Vec g = p.g(x);
  CHECK(g(1) == doctest::Approx(1.5));   // x1 + 1
  CHECK(g(2) == doctest::Approx(2.5));   // 3 - x1
  CHECK(g(3) == doctest::Approx(0.25));  // x2
}

TEST_CASE("analytic derivatives agree with central differences") {
  const NlpProblem p = small_problem();
  Vec x(2);
  x << 0.7, -0.3;
  const Vec fd = oracle::fd_gradient([&](const Vec& y) { return p.f(y); }, x);
  CHECK((p.grad_f(x) - fd).norm() < 1e-7);
  const Mat Hfd = oracle::fd_jacobian([&](const Vec& y) { return p.grad_f(y); }, x);
  CHECK((p.hess_f(x) - Hfd).norm() < 1e-6);
  const Mat Jg = oracle::fd_jacobian([&](const Vec& y) { return p.g(y); }, x);
  CHECK((p.jac_g(x) - Jg.transpose()).norm() < 1e-7);  // column per constraint
}

TEST_CASE("third-order oracle and Hessian-difference fallback agree") {
  const NlpProblem with = small_problem(true);
  const NlpProblem without = small_problem(false);
  Vec x(2), d(2);
  x << 0.4, 1.2;
  d << -0.8, 0.3;
  const long before = without.stats().third_order_fd_calls.load();
  const Vec a = with.d3f(x, d);
  const Vec b = without.d3f(x, d);
  CHECK((a - b).norm() < 1e-6 * std::max(1.0, a.norm()));
  CHECK(without.stats().third_order_fd_calls.load() == before + 1);
  CHECK(with.stats().third_order_fd_calls.load() == 0);
  CHECK_FALSE(without.has_third_order());
}

TEST_CASE("lagrangian pieces match explicit sums") {
  const NlpProblem p = small_problem();
  Vec x(2), y(1), w(4), d(2);
  x << 0.3, 0.9;
  y << 0.7;
  w << 1.0, 2.0, 0.5, 0.25;
  d << 0.2, -0.6;
  Mat H = p.hess_f(x);
  for (int i = 0; i < p.m(); ++i) H -= y(i) * p.hess_h(i, x);
  for (int i = 0; i < p.p(); ++i) H -= w(i) * p.hess_g(i, x);
  CHECK((eval_lagrangian_hessian(p, x, y, w) - H).norm() < 1e-14);

  Vec c = Vec::Zero(2);
  for (int i = 0; i < p.p(); ++i) c += w(i) * p.hess_g(i, x) * d;
  CHECK((contract_hess_g(p, x, w, d) - c).norm() < 1e-14);

  Vec q(p.p());
  for (int i = 0; i < p.p(); ++i) q(i) = d.dot(p.hess_g(i, x) * d);
  CHECK((quad_form_g(p, x, d) - q).norm() < 1e-14);
}

TEST_CASE("non-finite callback values raise EvaluationError naming the block") {
  ScalarFunction f = linear_function(Vec::Ones(1), 0.0);
  f.gradient = [](const Vec&) { return Vec::Constant(1, std::nan("")); };
  const NlpProblem p("bad", 1, f, {}, {linear_function(Vec::Ones(1), 1.0)});
  try {
    PointEval::at(p, Vec::Zero(1));
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.block() == "grad_f");
  }
}

TEST_CASE("check_derivatives flags a corrupted gradient") {
  const BenchmarkEntry e = get_problem("HS71");
  CHECK(check_derivatives(*e.problem, e.interior_start, 1e-5, 1e-4).passed);

  ScalarFunction f = e.problem->objective();
  auto grad = f.gradient;
  f.gradient = [grad](const Vec& x) {
    Vec g = grad(x);
    g(2) += 1e-3;
    return g;
  };
  const NlpProblem broken("broken", 4, f, e.problem->equalities(), e.problem->inequalities());
  const DerivativeReport rep = check_derivatives(broken, e.interior_start, 1e-5, 1e-4);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.worst() != nullptr);
  CHECK(rep.worst()->callback == "grad_f");
}

TEST_CASE("wrong dimensions are contract violations") {
  const NlpProblem p = small_problem();
  CHECK_THROWS_AS(p.f(Vec::Zero(3)), ContractViolation);
  CHECK_THROWS_AS(quadratic_function(Mat::Identity(2, 3), Vec::Zero(2), 0.0), ContractViolation);
}
