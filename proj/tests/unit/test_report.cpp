#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "arcsearch/errors.hpp"
#include "arcsearch/report_io.hpp"
#include "arcsearch/runner.hpp"

using namespace arcsearch;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

RunArtifact hs19_artifact() {
  const BenchmarkEntry e = get_problem("HS19");
  Iterate v0;
  v0.x = e.interior_start;
  SolverConfig cfg;
  cfg.sigma_cap_override = 0.11;
  return RunArtifact::from_report(solve(*e.problem, v0, cfg), cfg);
}

}  // namespace

TEST_CASE("run artifact round-trips losslessly") {
  RunArtifact a = hs19_artifact();
  a.trace[0].rcond = std::numeric_limits<double>::infinity();
  const std::string text = to_json(a);
  const RunArtifact b = run_artifact_from_json(text);
  CHECK(to_json(b) == text);
  CHECK(b.schema == kRunSchema);
  CHECK(b.problem == "HS19");
  CHECK(b.status == a.status);
  CHECK(same_bits(b.objective, a.objective));
  CHECK(same_bits(b.conv_phi, a.conv_phi));
  REQUIRE(b.x.size() == a.x.size());
  for (int i = 0; i < a.x.size(); ++i) CHECK(same_bits(b.x(i), a.x(i)));
  REQUIRE(b.trace.size() == a.trace.size());
  CHECK(std::isinf(b.trace[0].rcond));
  CHECK(same_bits(b.trace.back().step.alpha_k, a.trace.back().step.alpha_k));
  CHECK(b.config.sigma_cap_override.value() == 0.11);
  CHECK_FALSE(b.config.rhs_mode.has_value());
}

TEST_CASE("artifact parsing rejects bad input") {
  CHECK_THROWS_AS(run_artifact_from_json("{"), ParseError);
  CHECK_THROWS_AS(run_artifact_from_json(R"({"schema": "other/1"})"), ParseError);
  CHECK_THROWS_AS(run_artifact_from_json(R"({"schema": "arcsearch.run/1"})"), ParseError);
}

TEST_CASE("config overlay") {
  SolverConfig c = config_from_json(R"({"variant": 2, "epsilon": 1e-10,
      "regularization": {"curvature_correction": false}, "rhs_mode": "naive"})");
  CHECK(c.variant == 2);
  CHECK(c.epsilon == 1e-10);
  CHECK_FALSE(c.regularization.curvature_correction);
  CHECK(c.rhs_mode == RhsMode::naive);
  CHECK(c.max_iter == 500);
  CHECK_THROWS_AS(config_from_json(R"({"epsilom": 1})"), ParseError);
  CHECK_THROWS_AS(config_from_json(R"({"epsilon": -1})"), ContractViolation);
  const SolverConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("bench table layout") {
  const auto rows = run_bench({"HS16", "HS19"}, {SolverConfig{}});
  const std::string csv = bench_csv(rows);
  std::istringstream in(csv);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  CHECK(l1 == "# schema=arcsearch.bench/1");
  CHECK(l2.rfind("Prob,Obj,Iter,Seconds,ConvPhi,", 0) == 0);
  CHECK(l3.rfind("HS16,", 0) == 0);
  // ConvPhi carries five significant digits, e.g. 4.7660e-09
  std::vector<std::string> cells;
  std::stringstream ls(l3);
  for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
  REQUIRE(cells.size() >= 5);
  CHECK(cells[4].size() == std::strlen("4.7660e-09"));
  CHECK(rows[1].table->iterations == 22);
  CHECK(bench_json(rows).find("\"schema\": \"arcsearch.bench/1\"") != std::string::npos);
}

TEST_CASE("bench sets") {
  CHECK(bench_set("hs-subset").size() == 9);
  CHECK_THROWS_AS(bench_set(""), ContractViolation);
  CHECK_THROWS_AS(bench_set("  "), ContractViolation);
  CHECK_THROWS_AS(bench_set("HS19,nope"), LookupError);
  CHECK(bench_set("HS19, WB") == std::vector<std::string>{"HS19", "WB"});
  const auto table = bench_set("table");
  CHECK(std::find(table.begin(), table.end(), "WB") == table.end());
}

TEST_CASE("runs are deterministic apart from timings") {
  auto strip = [](RunArtifact a) {
    a.seconds = 0;
    for (auto& r : a.trace) r.seconds = 0;
    return to_json(a);
  };
  CHECK(strip(hs19_artifact()) == strip(hs19_artifact()));
  auto rows1 = run_bench(subset_names(), {SolverConfig{}}, 1);
  auto rows4 = run_bench(subset_names(), {SolverConfig{}}, 4);
  for (auto* rows : {&rows1, &rows4})
    for (auto& r : *rows) r.seconds = 0;
  CHECK(bench_csv(rows1) == bench_csv(rows4));
}

TEST_CASE("trace samples the arc of every iteration") {
  const BenchmarkEntry e = get_problem("HS19");
  Iterate v0;
  v0.x = e.interior_start;
  SolverConfig cfg;
  std::vector<Vec> iterates;
  const TraceResult t = trace_run(*e.problem, v0, cfg, 50);
  const SolveReport plain = solve(*e.problem, v0, cfg, [&](const Iterate& v, const IterationOutcome&) {
    iterates.push_back(v.x);
  });
  REQUIRE(t.samples.size() == 50 * static_cast<size_t>(t.report.iterations) + 1);
  for (int k = 0; k < t.report.iterations; ++k) {
    const TraceSample& first = t.samples[50 * k];
    CHECK(first.iter == k);
    CHECK(first.alpha == 0.0);
    CHECK((first.x - iterates[k]).norm() == 0.0);
    CHECK(t.samples[50 * k + 49].alpha == doctest::Approx(std::numbers::pi / 2));
  }
  const Vec& last = t.samples.back().x;
  REQUIRE(last.size() == plain.final_iterate.x.size());
  for (int i = 0; i < last.size(); ++i) CHECK(same_bits(last(i), plain.final_iterate.x(i)));
  const std::string csv = trace_csv(t, 2);
  CHECK(csv.rfind("iter,alpha,x1,x2,phi\n", 0) == 0);
}
