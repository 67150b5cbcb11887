#include <random>

#include "doctest.h"
#include "arcsearch/kkt.hpp"
#include "arcsearch/problems.hpp"
#include "oracles.hpp"

using namespace arcsearch;

TEST_CASE("residual blocks on a hand-computed point") {
  // min x1^2 + x2^2  s.t.  x1 + x2 - 1 = 0,  x1 >= 0
  Mat Q = 2 * Mat::Identity(2, 2);
  Vec a(2);
  a << 1, 1;
  Vec e1(2);
  e1 << 1, 0;
  const NlpProblem p = ProblemBuilder("hand", 2)
                           .objective(quadratic_function(Q, Vec::Zero(2), 0.0))
                           .equality(linear_function(a, -1.0))
                           .inequality(linear_function(e1, 0.0))
                           .build();
  Iterate v;
  v.x = Vec(2);
  v.x << 0.25, 0.5;
  v.y = Vec::Constant(1, 0.5);
  v.w = Vec::Constant(1, 2.0);
  v.s = Vec::Constant(1, 0.2);
  v.z = Vec::Constant(1, 1.5);
  const KktResidual r = residual(p, v);
  // grad L = (0.5, 1) - 0.5 (1, 1) - 2 (1, 0)
  CHECK(r.r_L(0) == doctest::Approx(-2.0));
  CHECK(r.r_L(1) == doctest::Approx(0.5));
  CHECK(r.r_h(0) == doctest::Approx(-0.25));
  CHECK(r.r_g(0) == doctest::Approx(0.05));
  CHECK(r.r_wz(0) == doctest::Approx(0.5));
  CHECK(r.r_comp(0) == doctest::Approx(0.3));
  CHECK(merit(r) == doctest::Approx(4 + 0.25 + 0.0625 + 0.0025 + 0.25 + 0.09));
  CHECK(dual_measure(v.z, v.s) == doctest::Approx(0.3));
  CHECK((r.flat() - oracle::kkt_residual(p, v)).norm() < 1e-15);
}

TEST_CASE("jacobian matches differenced residual on library problems") {
  std::mt19937 rng(7);
  for (const char* name : {"HS19", "HS32", "HS71", "HS80", "WB", "HS108"}) {
    CAPTURE(name);
    const BenchmarkEntry e = get_problem(name);
    const Iterate v = oracle::random_iterate(*e.problem, e.interior_start, rng);
    const Mat K = jacobian(*e.problem, v).matrix;
    const Mat Kfd = oracle::fd_kkt_jacobian(*e.problem, v);
    CHECK((K - Kfd).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, K.cwiseAbs().maxCoeff()));
    CHECK((residual(*e.problem, v).flat() - oracle::kkt_residual(*e.problem, v)).norm() <
          1e-12 * std::max(1.0, oracle::kkt_residual(*e.problem, v).norm()));
  }
}

TEST_CASE("neighborhood margin formula") {
  KktResidual r;
  r.r_L = Vec::Constant(1, 1.0);
  r.r_h = Vec(0);
  r.r_g = Vec::Zero(2);
  r.r_wz = Vec::Zero(2);
  r.r_comp = Vec(2);
  r.r_comp << 0.5, 2.0;
  const NeighborhoodRef ref = NeighborhoodRef::from_initial(r);
  CHECK(ref.min_comp0 == doctest::Approx(0.5));
  CHECK(ref.phi0 == doctest::Approx(1 + 0.25 + 4));
  // margin at the reference point: 0.5 - 0.5 * 0.5 = 0.25
  CHECK(neighborhood_margin(r, r.r_comp, ref) == doctest::Approx(0.25));
}
