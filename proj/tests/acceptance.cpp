// Acceptance suite. Prints one PASS/FAIL line per criterion and exits 0 only
// when the failing set equals --expect-fail (default: none).
//
//   acceptance [--expect-fail 3,10] [--report PATH]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arcsearch/errors.hpp"
#include "arcsearch/problems.hpp"
#include "arcsearch/runner.hpp"
#include "arcsearch/solver.hpp"
#include "oracles.hpp"

using namespace arcsearch;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Published reference objectives.
constexpr double kHs19Objective = -6961.8139;
const std::vector<std::pair<std::string, double>> kSubset = {
    {"HS16", 0.25},     {"HS17", 1.0},       {"HS23", 2.0},
    {"HS32", 1.0},      {"HS64", 6299.8424}, {"HS66", 0.51816},
    {"HS71", 17.014},   {"HS80", 0.05395},   {"HS108", -0.86603}};

// Tolerances.
constexpr double kHs19RelTol = 1e-3;
constexpr int kHs19MaxIter = 66;
constexpr double kHs19MaxSeconds = 5.0;
constexpr double kSubsetRelTol = 1e-4;
constexpr double kHs64RelTol = 1e-3;
constexpr int kSubsetMaxIter = 150;
constexpr double kSubsetMaxSeconds = 60.0;
constexpr double kPhiTol = 1e-8;
constexpr double kReproEpsilon = 1e-10;
constexpr double kWbDistance = 1e-6;
constexpr int kWbMaxIter = 200;
constexpr double kHs13Distance = 1e-2;
constexpr int kArcDraws = 200;
constexpr double kTangentRelTol = 1e-6;
constexpr double kCompTol = 1e-12;
constexpr double kNewtonTol = 1e-8;
constexpr int kStepInstances = 2000;
constexpr double kGridStep = 1e-5;
constexpr double kDerivTol = 1e-5;
constexpr double kDerivTolThird = 1e-4;

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

std::vector<std::string> available() { return bench_set("all"); }

SolveReport run(const BenchmarkEntry& e, const SolverConfig& cfg, const IterationObserver& obs = {}) {
  Iterate v0;
  v0.x = e.interior_start;
  return solve(*e.problem, v0, cfg, obs);
}

SolverConfig repro_config() {
  SolverConfig c;
  c.epsilon = kReproEpsilon;
  return c;
}

Line c1() {
  const BenchmarkEntry e = get_problem("HS19");
  const SolveReport r = run(e, repro_config());
  const double err = rel_err(r.objective, kHs19Objective);
  const bool ok = r.status == SolveStatus::converged && err <= kHs19RelTol &&
                  r.final_phi <= kPhiTol && r.iterations <= kHs19MaxIter &&
                  r.seconds <= kHs19MaxSeconds;
  return {1, "HS19 reproduction", ok,
          fmt("obj %.6f rel %.2e phi %.2e iter %d time %.3fs %s", r.objective, err, r.final_phi,
              r.iterations, r.seconds, to_string(r.status))};
}

Line c2() {
  bool ok = true;
  double total = 0.0;
  std::ostringstream d;
  for (const auto& [name, ref] : kSubset) {
    const SolveReport r = run(get_problem(name), repro_config());
    const double err = std::abs(r.objective - ref) / std::abs(ref);
    const double tol = name == "HS64" ? kHs64RelTol : kSubsetRelTol;
    const bool row = r.status == SolveStatus::converged && err <= tol && r.final_phi <= kPhiTol &&
                     r.iterations <= kSubsetMaxIter;
    ok = ok && row;
    total += r.seconds;
    d << fmt("%s:%s rel %.1e it %d; ", name.c_str(), row ? "ok" : "BAD", err, r.iterations);
  }
  ok = ok && total <= kSubsetMaxSeconds;
  d << fmt("total %.3fs", total);
  return {2, "table subset", ok, d.str()};
}

Line c3() {
  const BenchmarkEntry e = get_problem("WB");
  Iterate v0;
  v0.x = Vec{{-4.0, 1.0, 1.0}};
  SolverConfig cfg;
  cfg.max_iter = kWbMaxIter;
  const SolveReport r = solve(*e.problem, v0, cfg);
  const Vec target{{2.0, 3.0, 0.0}};
  const double dist = (r.final_iterate.x - target).norm();
  const bool ok = dist <= kWbDistance && r.iterations <= kWbMaxIter;
  const Vec& x = r.final_iterate.x;
  return {3, "WB recovery", ok,
          fmt("x=(%.4g, %.4g, %.4g) dist %.2e iter %d %s", x(0), x(1), x(2), dist, r.iterations,
              to_string(r.status))};
}

Line c4() {
  const SolveReport r = run(get_problem("HS13"), SolverConfig{});
  const Vec& x = r.final_iterate.x;
  const double dist = (x - Vec{{1.0, 0.0}}).norm();
  return {4, "HS13 LICQ failure", dist <= kHs13Distance,
          fmt("x=(%.6g, %.3g) dist %.2e iter %d %s", x(0), x(1), dist, r.iterations,
              to_string(r.status))};
}

Line c5() {
  struct Snap {
    std::string prob;
    Iterate v;
    ArcState arc;
  };
  std::vector<Snap> snaps;
  std::vector<std::string> names = subset_names();
  names.push_back("HS19");
  for (const auto& n : names) {
    const BenchmarkEntry e = get_problem(n);
    run(e, SolverConfig{},
        [&](const Iterate& v, const IterationOutcome& o) { snaps.push_back({n, v, o.arc}); });
  }
  std::mt19937 rng(5);
  std::uniform_int_distribution<size_t> pick(0, snaps.size() - 1);
  std::uniform_real_distribution<double> ang(0.0, kHalfPi);
  int exact_fail = 0, tangent_fail = 0, comp_fail = 0, on_floor = 0;
  double worst_tangent = 0.0, worst_comp = 0.0;
  for (int t = 0; t < kArcDraws; ++t) {
    const Snap& s = snaps[pick(rng)];
    const double alpha = ang(rng);
    const Vec v = oracle::stack(s.v);
    if (oracle::stack(eval_arc(s.v, s.arc, 0.0)) != v) ++exact_fail;
    // one-sided, Richardson-extrapolated: the arc is only defined for alpha >= 0
    const double h = 1e-3;
    const Vec d1 = (oracle::stack(eval_arc(s.v, s.arc, h)) - v) / h;
    const Vec d2 = (oracle::stack(eval_arc(s.v, s.arc, 2 * h)) - v) / (2 * h);
    const Vec fd = 2 * d1 - d2;
    const Vec vdot = oracle::stack(s.arc.vdot);
    // rounding v(h) - v costs about eps |v| / h; small tangents near the end of a
    // run sit on that floor
    const double floor = 4 * std::numeric_limits<double>::epsilon() * v.norm() / h;
    const double err = (fd + vdot).norm();
    worst_tangent = std::max(worst_tangent, err / vdot.norm());
    if (floor > kTangentRelTol * vdot.norm()) ++on_floor;
    if (err > kTangentRelTol * vdot.norm() + floor) ++tangent_fail;
    const Iterate c = eval_arc(s.v, s.arc, alpha);
    for (int i = 0; i < c.z.size(); ++i) {
      const double direct = c.z(i) * c.s(i);
      const double ce = std::abs(complementarity_along_arc(i, s.v, s.arc, alpha) - direct) /
                        std::max(1.0, std::abs(direct));
      worst_comp = std::max(worst_comp, ce);
      if (ce > kCompTol) ++comp_fail;
    }
  }
  return {5, "arc identities", exact_fail == 0 && tangent_fail == 0 && comp_fail == 0,
          fmt("%d draws from %zu iterates; v(0) mismatches %d; tangent worst %.1e "
              "(%d over, %d at rounding floor); comp worst %.1e (%d over)",
              kArcDraws, snaps.size(), exact_fail, worst_tangent, tangent_fail, on_floor,
              worst_comp, comp_fail)};
}

Line c6() {
  bool ok = true;
  std::ostringstream d;
  RegularizationPolicy plain;
  plain.curvature_correction = false;
  for (const auto& n : available()) {
    const BenchmarkEntry e = get_problem(n);
    const NlpProblem& prob = *e.problem;
    Iterate v0;
    v0.x = e.interior_start;
    const Iterate v = init_check(prob, v0, SolverConfig{}.multiplier_start);
    const PointEval pe = PointEval::at(prob, v.x);
    const KktResidual res = residual(pe, v);
    const KktMatrix K = jacobian(pe, v);
    const KktFactorization fac = factorize(K, plain);
    const ArcState arc = compute_arc(prob, pe, v, res, fac, 0.0, RhsMode::third_free);
    const Vec k = oracle::kkt_residual(prob, v);
    const double err = (K.matrix * oracle::stack(arc.vdot) - k).norm();
    const double bound = kNewtonTol * std::max(1.0, k.norm());
    if (err > bound) {
      ok = false;
      d << fmt("%s err %.1e lambda %.1e; ", n.c_str(), err, fac.lambda());
    }
  }
  if (ok) d << fmt("%zu problems", available().size());
  return {6, "Newton direction", ok, d.str()};
}

Line c7() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pos(0.01, 10.0), d(-10.0, 10.0);
  const double deltas[] = {0.0, 0.01, 0.1, 0.5};
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < kStepInstances; ++t) {
    const int k = 1 + t % 6;
    Vec c(k), cd(k), cdd(k);
    for (int i = 0; i < k; ++i) {
      c(i) = pos(rng);
      cd(i) = d(rng);
      cdd(i) = d(rng);
    }
    const double delta1 = deltas[t % 4];
    const double a = alpha_positivity(c, cd, cdd, delta1);
    const double g = oracle::grid_positivity(c, cd, cdd, delta1, kGridStep);
    worst = std::max(worst, std::abs(a - g));
    if (a < g - 1e-12 || a > g + kGridStep + 1e-12) ++bad;
  }
  return {7, "step-size oracle", bad == 0,
          fmt("%d instances, %d outside grid cell, worst |closed - grid| %.2e", kStepInstances, bad,
              worst)};
}

struct Sweep {
  std::string prob;
  int variant;
  SolveReport report;
};

std::vector<Sweep> sweep(const RegularizationPolicy& reg) {
  std::vector<Sweep> out;
  for (const auto& n : available()) {
    const BenchmarkEntry e = get_problem(n);
    for (int variant = 1; variant <= 3; ++variant) {
      SolverConfig cfg;
      cfg.variant = variant;
      cfg.regularization = reg;
      cfg = config_for(e, cfg);
      try {
        out.push_back({n, variant, run(e, cfg)});
      } catch (const InitializationError&) {
      }
    }
  }
  return out;
}

Line c8(const std::vector<Sweep>& runs) {
  int converged = 0, bad = 0;
  std::ostringstream d;
  for (const auto& s : runs) {
    if (s.report.status != SolveStatus::converged) continue;
    ++converged;
    for (const auto& rec : s.report.history) {
      if (!(rec.phi_next < rec.phi) || rec.margin_next < 0.0) {
        ++bad;
        d << fmt("%s/v%d k=%d; ", s.prob.c_str(), s.variant, rec.k);
        break;
      }
    }
  }
  d << fmt("%d converged runs, %d violations", converged, bad);
  return {8, "monotone merit and neighborhood", bad == 0, d.str()};
}

Line c9(const std::vector<Sweep>& runs, const std::vector<Sweep>& no_fallback) {
  auto count = [](const std::vector<Sweep>& rs, std::map<std::string, int>* where) {
    int iters = 0, bad = 0;
    for (const auto& s : rs) {
      for (const auto& rec : s.report.history) {
        ++iters;
        if (rec.factorizations != 1 || rec.kkt_solves != 2) {
          ++bad;
          if (where) ++(*where)[fmt("%s/v%d", s.prob.c_str(), s.variant)];
        }
      }
    }
    return std::pair{iters, bad};
  };
  std::map<std::string, int> where;
  const auto [iters, bad] = count(runs, &where);
  const auto [iters_nf, bad_nf] = count(no_fallback, nullptr);
  std::ostringstream d;
  d << fmt("%d iterations, %d off-contract", iters, bad);
  if (bad) {
    d << " (";
    bool first = true;
    for (const auto& [k, v] : where) {
      d << (first ? "" : ", ") << k << ' ' << v;
      first = false;
    }
    d << ")";
  }
  d << fmt("; descent fallback off: %d iterations, %d off-contract", iters_nf, bad_nf);
  return {9, "factorization reuse", bad == 0, d.str()};
}

Line c10() {
  bool ok = true;
  std::ostringstream d;
  for (const char* n : {"HS16", "HS17"}) {
    const BenchmarkEntry e = get_problem(n);
    SolverConfig tf = config_for(e, {}), nv = tf;
    tf.rhs_mode = RhsMode::third_free;
    nv.rhs_mode = RhsMode::naive;
    const SolveReport a = run(e, tf), b = run(e, nv);
    const bool row = b.iterations > a.iterations;
    ok = ok && row;
    d << fmt("%s naive %d (%s) vs third-free %d (%s); ", n, b.iterations, to_string(b.status),
             a.iterations, to_string(a.status));
  }
  return {10, "naive second-order rhs", ok, d.str()};
}

Line c11() {
  bool ok = true;
  int points = 0;
  std::ostringstream d;
  for (const auto& n : available()) {
    const BenchmarkEntry e = get_problem(n);
    std::vector<Vec> xs = {e.interior_start, e.standard_start};
    if (e.reference_solution) xs.push_back(*e.reference_solution);
    for (const Vec& x : xs) {
      try {
        const DerivativeReport r = check_derivatives(*e.problem, x, kDerivTol, kDerivTolThird);
        ++points;
        if (!r.passed) {
          ok = false;
          for (const auto& en : r.entries)
            if (!en.passed)
              d << fmt("%s %s rel %.1e; ", n.c_str(), en.callback.c_str(), en.max_rel_error);
        }
      } catch (const EvaluationError&) {
        // point outside the domain
      }
    }
  }
  d << fmt("%zu problems, %d points", available().size(), points);
  return {11, "derivative oracles", ok, d.str()};
}

std::set<int> parse_ids(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--expect-fail" && i + 1 < argc) {
      expect = parse_ids(argv[++i]);
    } else if (a == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--expect-fail 3,10] [--report PATH]\n";
      return 64;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Line> lines;
  auto emit = [&](Line l) {
    std::cout << fmt("[%s] %2d %-32s %s", l.pass ? "PASS" : "FAIL", l.id, l.name.c_str(),
                     l.detail.c_str())
              << std::endl;
    lines.push_back(std::move(l));
  };
  emit(c1());
  emit(c2());
  emit(c3());
  emit(c4());
  emit(c5());
  emit(c6());
  emit(c7());
  const std::vector<Sweep> runs = sweep({});
  RegularizationPolicy nf;
  nf.descent_fallback = false;
  emit(c8(runs));
  emit(c9(runs, sweep(nf)));
  emit(c10());
  emit(c11());

  std::set<int> failed;
  for (const auto& l : lines)
    if (!l.pass) failed.insert(l.id);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream summary;
  summary << fmt("%zu/%zu passed in %.2fs; failed:", lines.size() - failed.size(), lines.size(),
                 secs);
  for (int id : failed) summary << ' ' << id;
  if (failed.empty()) summary << " none";
  summary << "; expected:";
  for (int id : expect) summary << ' ' << id;
  if (expect.empty()) summary << " none";
  std::cout << summary.str() << std::endl;

  if (!report_path.empty()) {
    std::ofstream out(report_path);
    for (const auto& l : lines)
      out << (l.pass ? "PASS" : "FAIL") << '\t' << l.id << '\t' << l.name << '\t' << l.detail
          << '\n';
    out << summary.str() << '\n';
  }
  return failed == expect ? 0 : 1;
}
