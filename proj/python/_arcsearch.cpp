#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arcsearch/errors.hpp"
#include "arcsearch/model.hpp"
#include "arcsearch/problems.hpp"
#include "arcsearch/report_io.hpp"
#include "arcsearch/runner.hpp"
#include "arcsearch/solver.hpp"

namespace py = pybind11;
using namespace arcsearch;

namespace {

BenchmarkEntry resolve(const std::string& problem) {
  if (problem.ends_with(".nlp") || std::filesystem::exists(problem))
    return load_problem_file(problem);
  return get_problem(problem);
}

Iterate start_of(const BenchmarkEntry& e, const std::optional<Vec>& x0) {
  Iterate v0;
  v0.x = x0 ? *x0 : e.interior_start;
  return v0;
}

py::dict entry_info(const BenchmarkEntry& e) {
  py::dict d;
  d["name"] = e.name;
  d["n"] = e.problem->n();
  d["m"] = e.problem->m();
  d["p"] = e.problem->p();
  d["interior_start"] = e.interior_start;
  d["standard_start"] = e.standard_start;
  d["start_note"] = e.start_note;
  d["reference_objective"] = e.reference_objective;
  d["reference_solution"] = e.reference_solution;
  d["epsilon"] = e.epsilon;
  d["source"] = e.source;
  if (e.table) {
    py::dict t;
    t["objective"] = e.table->objective;
    t["iterations"] = e.table->iterations;
    t["seconds"] = e.table->seconds;
    t["conv_phi"] = e.table->conv_phi;
    d["table"] = t;
  } else {
    d["table"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_arcsearch, m) {
  m.doc() = "Arc-search interior-point NLP solver";

  // Error types live on the module; the translator looks them up by name.
  const py::object base = py::exception<std::exception>(m, "ArcsearchError");
  for (const char* name : {"InitializationError", "EvaluationError", "FactorizationError",
                           "StepStallError", "ParseError", "ProblemNotFound"})
    m.attr(name) = py::exception<std::exception>(m, name, base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    auto raise = [](const char* type, const std::exception& ex, const char* attr = nullptr,
                    py::object value = py::none()) {
      const py::object cls = py::module_::import("arcsearch._arcsearch").attr(type);
      py::object err = cls(ex.what());
      if (attr) err.attr(attr) = value;
      PyErr_SetObject(cls.ptr(), err.ptr());
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InitializationError& e) {
      raise("InitializationError", e, "component", py::str(e.component()));
    } catch (const EvaluationError& e) {
      raise("EvaluationError", e, "block", py::str(e.block()));
    } catch (const FactorizationError& e) {
      raise("FactorizationError", e);
    } catch (const StepStallError& e) {
      raise("StepStallError", e, "gap", py::float_(e.gap()));
    } catch (const ParseError& e) {
      raise("ParseError", e, "line", py::int_(e.line()));
    } catch (const LookupError& e) {
      raise("ProblemNotFound", e);
    } catch (const ContractViolation& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("problem_names", &problem_names);
  m.def("subset_names", &subset_names);
  m.def("bench_set", &bench_set, py::arg("set"));
  m.def("data_dir", &data_dir);
  m.def(
      "problem_info", [](const std::string& problem) { return entry_info(resolve(problem)); },
      py::arg("problem"));

  m.def("default_config", [] { return config_to_json(SolverConfig{}); });

  m.def(
      "solve",
      [](const std::string& problem, std::optional<Vec> x0, const std::string& config) {
        const BenchmarkEntry e = resolve(problem);
        const SolverConfig cfg = config_from_json(config, config_for(e, {}));
        SolveReport rep;
        {
          py::gil_scoped_release release;
          rep = solve(*e.problem, start_of(e, x0), cfg);
        }
        return to_json(RunArtifact::from_report(rep, cfg), -1);
      },
      py::arg("problem"), py::arg("x0") = py::none(), py::arg("config") = "{}",
      "Solves and returns the run artifact as JSON text.");

  m.def(
      "bench",
      [](const std::string& set, const std::vector<std::string>& configs, int jobs,
         bool csv) {
        std::vector<SolverConfig> cfgs;
        for (const auto& c : configs) cfgs.push_back(config_from_json(c));
        if (cfgs.empty()) cfgs.emplace_back();
        const std::vector<std::string> names = bench_set(set);
        std::vector<BenchRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_bench(names, cfgs, jobs);
        }
        return csv ? bench_csv(rows) : bench_json(rows, -1);
      },
      py::arg("set") = "hs-subset", py::arg("configs") = std::vector<std::string>{},
      py::arg("jobs") = 1, py::arg("csv") = false);

  m.def(
      "trace",
      [](const std::string& problem, std::optional<Vec> x0, const std::string& config,
         int samples) {
        const BenchmarkEntry e = resolve(problem);
        const SolverConfig cfg = config_from_json(config, config_for(e, {}));
        const TraceResult t = trace_run(*e.problem, start_of(e, x0), cfg, samples);
        const int n = e.problem->n();
        Mat out(static_cast<Eigen::Index>(t.samples.size()), n + 3);
        for (size_t r = 0; r < t.samples.size(); ++r) {
          const auto& s = t.samples[r];
          out(r, 0) = s.iter;
          out(r, 1) = s.alpha;
          out.row(r).segment(2, n) = s.x.transpose();
          out(r, n + 2) = s.phi;
        }
        return py::make_tuple(out, to_json(RunArtifact::from_report(t.report, cfg), -1));
      },
      py::arg("problem"), py::arg("x0") = py::none(), py::arg("config") = "{}",
      py::arg("samples") = 50);

  m.def(
      "check_derivatives",
      [](const std::string& problem, std::optional<Vec> x, double tol, double tol_third) {
        const BenchmarkEntry e = resolve(problem);
        const DerivativeReport r =
            check_derivatives(*e.problem, x ? *x : e.interior_start, tol, tol_third);
        py::list entries;
        for (const auto& en : r.entries) {
          py::dict d;
          d["callback"] = en.callback;
          d["order"] = en.order;
          d["max_rel_error"] = en.max_rel_error;
          d["worst_row"] = en.worst_row;
          d["worst_col"] = en.worst_col;
          d["finite"] = en.finite;
          d["passed"] = en.passed;
          entries.append(d);
        }
        return py::make_tuple(r.passed, entries);
      },
      py::arg("problem"), py::arg("x") = py::none(), py::arg("tol") = 1e-5,
      py::arg("tol_third") = 1e-4);
}
