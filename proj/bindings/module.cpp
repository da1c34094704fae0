#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "mlio/diet.hpp"
#include "mlio/engine.hpp"
#include "mlio/inverse.hpp"
#include "mlio/polytope.hpp"
#include "mlio/solvers.hpp"
#include "mlio/synthetic.hpp"

namespace py = pybind11;
using namespace mlio;

namespace {

// Python callers hand observations as a (count x dim) array, one row per
// observation; internally columns are observations.
ObservationSet make_observations(const Eigen::MatrixXd& points,
                                 std::optional<std::vector<std::string>> ids,
                                 std::optional<std::vector<std::string>> var_names) {
  ObservationSet X;
  X.points = points.transpose();
  if (ids) {
    if (static_cast<int>(ids->size()) != X.count())
      throw DimensionMismatch("ids length != observation count");
    X.ids = std::move(*ids);
  } else {
    for (int k = 0; k < X.count(); ++k) X.ids.push_back("p" + std::to_string(k + 1));
  }
  if (var_names) {
    if (static_cast<int>(var_names->size()) != X.dim())
      throw DimensionMismatch("var_names length != dimension");
    X.var_names = std::move(*var_names);
  } else {
    for (int j = 0; j < X.dim(); ++j) X.var_names.push_back("x" + std::to_string(j + 1));
  }
  return X;
}

MlioOptions make_options(int clusters, std::uint64_t seed, const std::string& metric,
                         int max_iter) {
  MlioOptions opts;
  opts.clusters = clusters;
  opts.seed = seed;
  opts.metric = parse_metric(metric);
  opts.max_iter = max_iter;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Preference-aware inverse optimization over polyhedral feasible sets";

  py::register_exception<MalformedInput>(m, "MalformedInputError", PyExc_ValueError);
  py::register_exception<InstanceTooLarge>(m, "InstanceTooLargeError", PyExc_ValueError);

  py::class_<FeasibleSet>(m, "FeasibleSet")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, double>(), py::arg("A"), py::arg("b"),
           py::arg("tol") = 1e-8)
      .def_property_readonly("A", &FeasibleSet::A)
      .def_property_readonly("b", &FeasibleSet::b)
      .def_property_readonly("rows", &FeasibleSet::rows)
      .def_property_readonly("dim", &FeasibleSet::dim)
      .def_property_readonly("row_names", &FeasibleSet::row_names)
      .def_property_readonly("var_names", &FeasibleSet::var_names)
      .def_property_readonly("witness", &FeasibleSet::witness)
      .def("contains", &FeasibleSet::contains, py::arg("x"))
      .def("boundary_distance", &FeasibleSet::boundary_distance, py::arg("x"))
      .def("enumerate_vertices", &FeasibleSet::enumerate_vertices);

  py::class_<ObservationSet>(m, "Observations")
      .def(py::init(&make_observations), py::arg("points"), py::arg("ids") = std::nullopt,
           py::arg("var_names") = std::nullopt)
      .def_property_readonly("points",
                             [](const ObservationSet& X) {
                               return Eigen::MatrixXd(X.points.transpose());
                             })
      .def_readonly("ids", &ObservationSet::ids)
      .def_readonly("var_names", &ObservationSet::var_names)
      .def_property_readonly("count", &ObservationSet::count)
      .def_property_readonly("dim", &ObservationSet::dim);

  py::class_<ClusterModel>(m, "ClusterModel")
      .def_readonly("members", &ClusterModel::members)
      .def_readonly("cost", &ClusterModel::cost)
      .def_property_readonly("representative",
                             [](const ClusterModel& model) { return model.z; })
      .def_readonly("face", &ClusterModel::face)
      .def_readonly("loss", &ClusterModel::loss)
      .def_readonly("gap", &ClusterModel::gap);

  py::class_<MlioSolution>(m, "Solution")
      .def_property_readonly("method",
                             [](const MlioSolution& sol) { return method_name(sol.method); })
      .def_property_readonly("termination",
                             [](const MlioSolution& sol) {
                               return termination_name(sol.termination);
                             })
      .def_property_readonly("assignments",
                             [](const MlioSolution& sol) { return sol.partition.assign; })
      .def_readonly("models", &MlioSolution::models)
      .def_readonly("total_loss", &MlioSolution::total_loss)
      .def_readonly("iterations", &MlioSolution::iterations)
      .def_readonly("seed", &MlioSolution::seed);

  py::class_<PartialOptimalityReport>(m, "PartialOptimalityReport")
      .def_readonly("reassignment_stable", &PartialOptimalityReport::reassignment_stable)
      .def_readonly("refit_stable", &PartialOptimalityReport::refit_stable)
      .def_readonly("witness", &PartialOptimalityReport::witness)
      .def("holds", &PartialOptimalityReport::holds);

  m.def("load_constraints", &load_constraints, py::arg("path"));
  m.def("save_constraints", &save_constraints, py::arg("set"), py::arg("path"));
  m.def("load_observations", &load_observations, py::arg("path"));
  m.def("save_observations", &save_observations, py::arg("observations"), py::arg("path"));

  m.def(
      "fit",
      [](const ObservationSet& X, const FeasibleSet* set, const std::string& method, int clusters,
         std::uint64_t seed, const std::string& metric, int max_iter) {
        return fit(X, set, parse_method(method), make_options(clusters, seed, metric, max_iter));
      },
      py::arg("observations"), py::arg("set").none(true), py::arg("method") = "emb",
      py::arg("clusters") = 1, py::arg("seed") = 42, py::arg("metric") = "sqeuclidean",
      py::arg("max_iter") = 500);

  m.def(
      "io_solve",
      [](const ObservationSet& X, const FeasibleSet& set, const std::string& metric) {
        return io_solve(X, set, parse_metric(metric));
      },
      py::arg("observations"), py::arg("set"), py::arg("metric") = "sqeuclidean");

  m.def(
      "certify",
      [](const ClusterModel& model, const FeasibleSet& set) {
        const CertifyReport report = certify(model, set);
        py::dict out;
        out["primal"] = report.primal;
        out["duality"] = report.duality;
        out["stationarity"] = report.stationarity;
        out["normalization"] = report.normalization;
        out["worst"] = report.worst();
        return out;
      },
      py::arg("model"), py::arg("set"));

  m.def(
      "verify_partial_optimal",
      [](const MlioSolution& sol, const ObservationSet& X, const FeasibleSet* set, double tol) {
        return verify_partial_optimal(sol, X, set, tol);
      },
      py::arg("solution"), py::arg("observations"), py::arg("set").none(true),
      py::arg("tol") = 1e-9);

  m.def(
      "optimality_gap",
      [](const MlioSolution& sol, const FeasibleSet& set) { return optimality_gap(sol, set); },
      py::arg("solution"), py::arg("set"));

  m.def(
      "solve_lp",
      [](const Eigen::VectorXd& c, const FeasibleSet& set, const std::string& sense) {
        const Sense s = sense == "max" ? Sense::Max : Sense::Min;
        const LpSolution sol = solve_lp(c, set, s);
        py::dict out;
        out["status"] = sol.status == LpStatus::Optimal
                            ? "optimal"
                            : (sol.status == LpStatus::Unbounded ? "unbounded" : "infeasible");
        out["x"] = sol.x;
        out["objective"] = sol.objective;
        return out;
      },
      py::arg("c"), py::arg("set"), py::arg("sense") = "max");

  m.def(
      "solution_json",
      [](const MlioSolution& sol, const ObservationSet& X) {
        return solution_to_json(sol, X).dump(2);
      },
      py::arg("solution"), py::arg("observations"));

  m.def("demo2d_polytope", &demo2d_polytope);
  m.def("gen2d_observations", &gen2d_observations, py::arg("count"), py::arg("seed"));
  m.def(
      "gen_diet",
      [](int count, std::uint64_t seed) {
        const DietData data = gen_diet(count, seed);
        return py::make_tuple(data.observations, build_diet_polytope(data.spec));
      },
      py::arg("count"), py::arg("seed"));
}
