#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "arcsearch/errors.hpp"
#include "arcsearch/kkt.hpp"
#include "arcsearch/problems.hpp"
#include "oracles.hpp"

using namespace arcsearch;

namespace {

std::vector<BenchmarkEntry> available() {
  std::vector<BenchmarkEntry> out;
  for (const auto& n : problem_names()) {
    try {
      out.push_back(get_problem(n));
    } catch (const LookupError&) {
    }
  }
  return out;
}

// Multipliers at x*: least squares on the active rows, zero elsewhere.
Iterate kkt_point(const NlpProblem& p, const Vec& x) {
  const Vec g = p.g(x);
  std::vector<int> active;
  for (int i = 0; i < p.p(); ++i)
    if (g(i) <= 1e-6 * std::max(1.0, std::abs(g(i)) + 1.0)) active.push_back(i);
  const int m = p.m(), a = static_cast<int>(active.size());
  Mat J(p.n(), m + a);
  if (m) J.leftCols(m) = p.jac_h(x);
  const Mat Jg = p.jac_g(x);
  for (int k = 0; k < a; ++k) J.col(m + k) = Jg.col(active[k]);
  const Vec mult = J.completeOrthogonalDecomposition().solve(p.grad_f(x));
  Iterate v;
  v.x = x;
  v.y = mult.head(m);
  v.w = Vec::Zero(p.p());
  for (int k = 0; k < a; ++k) v.w(active[k]) = mult(m + k);
  v.s = g;
  v.z = v.w;
  return v;
}

}  // namespace

TEST_CASE("documented dimensions") {
  const BenchmarkEntry hs19 = get_problem("HS19");
  CHECK(hs19.problem->n() == 2);
  CHECK(hs19.problem->m() == 0);
  CHECK(hs19.problem->p() == 6);
  CHECK(hs19.reference_objective == doctest::Approx(-6961.8139).epsilon(1e-8));
  const BenchmarkEntry wb = get_problem("WB");
  CHECK(wb.problem->n() == 3);
  CHECK(wb.problem->m() == 2);
  CHECK(wb.problem->p() == 2);
  REQUIRE(wb.reference_solution);
  Vec sol(3);
  sol << 2, 3, 0;
  CHECK((*wb.reference_solution - sol).norm() == 0.0);
  const BenchmarkEntry hs13 = get_problem("HS13");
  CHECK(hs13.problem->n() == 2);
  CHECK(hs13.problem->m() == 0);
  CHECK(hs13.problem->p() == 3);
}

TEST_CASE("reference table rows are verbatim") {
  CHECK(reference_table().size() == 17);
  auto r = table_row("19");
  REQUIRE(r);
  CHECK(r->objective == -6961.8139);
  CHECK(r->iterations == 22);
  CHECK(r->conv_phi == 7.563e-11);
  r = table_row("HS16");
  REQUIRE(r);
  CHECK(r->objective == 0.25);
  CHECK(r->conv_phi == 1.2313e-15);
  r = table_row("101");
  REQUIRE(r);
  CHECK(r->objective == 1809.7648);
  CHECK(r->iterations == 53);
  CHECK(r->conv_phi == 1.5096e-09);
  CHECK_FALSE(table_row("WB"));
}

TEST_CASE("lookup by alias and failure modes") {
  CHECK(get_problem("19").name == "HS19");
  CHECK(get_problem("hs71").name == "HS71");
  try {
    get_problem("HS999");
    FAIL("expected LookupError");
  } catch (const LookupError& e) {
    CHECK(std::string(e.what()).find("HS19") != std::string::npos);
  }
  CHECK_THROWS_AS(get_problem("HS59"), LookupError);
}

TEST_CASE("interior starts are strictly feasible and derivatives check out") {
  for (const auto& e : available()) {
    CAPTURE(e.name);
    CHECK(e.problem->g(e.interior_start).minCoeff() > 0.0);
    const DerivativeReport rep = check_derivatives(*e.problem, e.interior_start, 1e-5, 1e-4);
    CHECK(rep.passed);
    CHECK(e.problem->has_third_order());
  }
}

TEST_CASE("reference solutions are KKT points of their own encoding") {
  for (const auto& e : available()) {
    if (!e.reference_solution || e.name == "HS13") continue;
    CAPTURE(e.name);
    const Iterate v = kkt_point(*e.problem, *e.reference_solution);
    CHECK(merit(residual(*e.problem, v)) <= 1e-6);
    CHECK(e.problem->f(*e.reference_solution) ==
          doctest::Approx(e.reference_objective).epsilon(1e-5));
  }
}

TEST_CASE("problems load from .nlp files") {
  const auto path = std::filesystem::temp_directory_path() / "arcsearch_test_toy.nlp";
  {
    std::ofstream out(path);
    out << "name TOY\nn 2\nminimize (x1 - 1)^2 + (x2 - 2)^2\n"
           "ineq x1 + x2 <= 2\nbound 1 0 inf\nstart 0.5 0.5\nobjective_ref 0.5\n";
  }
  const BenchmarkEntry e = load_problem_file(path.string());
  std::filesystem::remove(path);
  CHECK(e.name == "TOY");
  CHECK(e.problem->p() == 2);
  CHECK(e.reference_objective == 0.5);
  CHECK((e.interior_start - Vec::Constant(2, 0.5)).norm() == 0.0);
}
