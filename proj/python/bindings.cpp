#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "netest/cli.hpp"
#include "netest/io.hpp"
#include "netest/solver.hpp"

namespace py = pybind11;
using namespace netest;

namespace {

StructuredMatrix pattern_from_edges(std::size_t n, const std::vector<Edge>& edges,
                                    bool self_loops) {
  StructuredMatrix a = pattern_from_digraph(Digraph(n, edges));
  return self_loops ? a.with_diagonal() : a;
}

std::vector<std::pair<std::size_t, std::size_t>> entries_of(const StructuredMatrix& m) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : m.positions()) out.emplace_back(p.row, p.col);
  return out;
}

}  // namespace

PYBIND11_MODULE(_netest, m) {
  m.doc() = "Minimum-cost networked estimator design";

  static py::exception<Error> error_type(m, "NetestError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = py::reinterpret_borrow<py::object>(error_type.ptr());
      py::object exc = cls(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<StructuredMatrix>(m, "Pattern")
      .def(py::init([](std::size_t rows, std::size_t cols,
                       const std::vector<std::pair<std::size_t, std::size_t>>& entries) {
             std::vector<Position> pos;
             for (auto [r, c] : entries) pos.push_back({r, c});
             return StructuredMatrix(rows, cols, std::move(pos));
           }),
           py::arg("rows"), py::arg("cols"), py::arg("entries"))
      .def_static("from_edges", &pattern_from_edges, py::arg("nodes"), py::arg("edges"),
                  py::arg("self_loops") = true,
                  "System pattern from edges s -> t (entry (t, s)).")
      .def_static("identity", &StructuredMatrix::identity)
      .def_property_readonly("rows", &StructuredMatrix::rows)
      .def_property_readonly("cols", &StructuredMatrix::cols)
      .def_property_readonly("entries", &entries_of)
      .def("to_dense", &StructuredMatrix::to_dense)
      .def("__eq__", [](const StructuredMatrix& a, const StructuredMatrix& b) { return a == b; })
      .def("__repr__", [](const StructuredMatrix& a) {
        return "Pattern(" + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", " +
               std::to_string(a.nonzeros()) + " entries)";
      });

  m.def(
      "scc",
      [](std::size_t n, const std::vector<Edge>& edges) {
        auto dec = scc_decompose(Digraph(n, edges));
        py::dict d;
        d["components"] = dec.components;
        d["component_of"] = dec.component_of;
        d["condensation_edges"] = dec.condensation_edges;
        d["parents"] = parent_sccs(dec);
        return d;
      },
      py::arg("nodes"), py::arg("edges"));

  m.def("is_self_damped", &is_self_damped);
  m.def("missing_self_loops", &missing_self_loops);

  m.def(
      "structurally_observable",
      [](const StructuredMatrix& a, const std::vector<std::size_t>& measured) {
        return is_structurally_observable(a, measured).observable;
      },
      py::arg("pattern"), py::arg("measured"));
  m.def(
      "parent_scc_coverage",
      [](const StructuredMatrix& a, const std::vector<std::size_t>& measured) {
        auto c = parent_scc_coverage(a, measured);
        return py::make_tuple(c.covered, c.uncovered_parents);
      },
      py::arg("pattern"), py::arg("measured"));
  m.def(
      "generic_rank_oracle",
      [](const StructuredMatrix& a, const std::vector<std::size_t>& measured,
         std::size_t trials, std::uint64_t seed) {
        auto t = generic_rank_oracle(a, measured, trials, seed);
        return py::make_tuple(t.observable_trials, t.trials);
      },
      py::arg("pattern"), py::arg("measured"), py::arg("trials"), py::arg("seed") = 0);
  m.def("observability_rank", &observability_rank, py::arg("a"), py::arg("c"));

  m.def(
      "hungarian",
      [](const Eigen::MatrixXd& cost) {
        auto a = hungarian(cost);
        return py::make_tuple(a.column_of_row, a.total_cost);
      },
      py::arg("cost"));
  m.def(
      "brute_force_assignment",
      [](const Eigen::MatrixXd& cost) {
        auto b = brute_force_assignment(cost);
        return py::make_tuple(b.column_of_row, b.cost);
      },
      py::arg("cost"));

  auto tree_tuple = [](const NetworkDesign& d) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (const auto& e : d.edges) edges.emplace_back(e.a, e.b, e.cost);
    return py::make_tuple(edges, d.total_cost);
  };
  m.def(
      "minimum_spanning_tree",
      [tree_tuple](const Eigen::MatrixXd& eta) {
        return tree_tuple(minimum_spanning_tree({eta}));
      },
      py::arg("eta"));
  m.def(
      "minimum_spanning_forest",
      [tree_tuple](const Eigen::MatrixXd& eta) {
        return tree_tuple(minimum_spanning_forest({eta}));
      },
      py::arg("eta"));
  m.def(
      "brute_force_mst",
      [tree_tuple](const Eigen::MatrixXd& eta) { return tree_tuple(brute_force_mst({eta})); },
      py::arg("eta"));

  m.def(
      "euler_discretize",
      [](const Eigen::MatrixXd& a, double t) { return euler_discretize({a, t}); },
      py::arg("a"), py::arg("step"));
  m.def(
      "tustin_discretize",
      [](const Eigen::MatrixXd& a, double t) { return tustin_discretize({a, t}); },
      py::arg("a"), py::arg("step"));

  m.def(
      "_solve_json",
      [](const StructuredMatrix& a, const Eigen::MatrixXd& delta, const Eigen::MatrixXd& eta,
         bool allow_extra_agents) {
        auto sol = solve_mcne(a, {delta}, {eta}, {.allow_extra_agents = allow_extra_agents});
        return dump_json(solution_to_json(sol));
      },
      py::arg("pattern"), py::arg("delta"), py::arg("eta"),
      py::arg("allow_extra_agents") = false);
  m.def(
      "_solve_file_json",
      [](const std::string& path) {
        ProblemSpec spec = load_problem(path);
        if (!spec.delta || !spec.eta) {
          throw Error(ErrorKind::kInvalidInput, "problem needs 'delta' and 'eta'");
        }
        auto sol = solve_mcne(spec.system, *spec.delta, *spec.eta,
                              {.allow_extra_agents = spec.options.allow_extra_agents});
        return dump_json(solution_to_json(sol));
      },
      py::arg("path"));
  m.def(
      "_verify_json",
      [](const StructuredMatrix& a, const StructuredMatrix& c, const StructuredMatrix& u,
         std::size_t trials, std::uint64_t seed) {
        auto r = verify_solution(a, c, u, trials, seed);
        Json j;
        j["report"] = report_to_json(r.report);
        if (r.oracle) j["oracle"] = oracle_to_json(*r.oracle);
        return j.dump();
      },
      py::arg("pattern"), py::arg("measurement"), py::arg("network"),
      py::arg("oracle_trials") = 0, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
