#include "shapeform/error.hpp"
#include "shapeform/experiment.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace shapeform;

namespace {

std::vector<Edge> to_edges(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Edge> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) out.emplace_back(a, b);
    return out;
}

std::vector<std::pair<int, int>> from_edges(const Graph& g) {
    std::vector<std::pair<int, int>> out;
    for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
    return out;
}

ShapeVector make_shape(const Eigen::VectorXd& values, bool squared) {
    return squared ? ShapeVector::from_squared(values) : ShapeVector::from_lengths(values);
}

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& obj) {
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(text);
}

py::dict trajectory_arrays(const Trajectory& traj) {
    const auto count = static_cast<Eigen::Index>(traj.samples.size());
    Eigen::VectorXd t(count);
    Eigen::VectorXd scale(count);
    Eigen::VectorXd cost(count);
    Eigen::VectorXd residual(count);
    Eigen::MatrixXd z(count, 2 * traj.agents);
    for (Eigen::Index k = 0; k < count; ++k) {
        const auto& s = traj.samples[static_cast<std::size_t>(k)];
        t(k) = s.t;
        scale(k) = s.scale;
        cost(k) = s.cumulative_cost;
        residual(k) = s.residual;
        z.row(k) = s.z.transpose();
    }
    py::dict d;
    d["t"] = t;
    d["z"] = z;
    d["scale"] = scale;
    d["cumJ"] = cost;
    d["residual"] = residual;
    d["termination"] = to_string(traj.termination);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Formation shape control with a state-dependent scale";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    py::class_<Graph>(m, "Graph")
        .def(py::init([](int n, const std::vector<std::pair<int, int>>& edges) { return Graph(n, to_edges(edges)); }),
             py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &Graph::vertex_count)
        .def_property_readonly("edges", &from_edges)
        .def("is_connected", &Graph::is_connected)
        .def("__len__", &Graph::edge_count);

    m.def("triangular_complement", [](const Graph& g) { return from_edges(triangular_complement(g)); });
    m.def("is_minimally_rigid", &is_minimally_rigid, py::arg("graph"), py::arg("z"));
    m.def("incidence", [](const Graph& g) { return oriented_incidence(g).matrix; });

    m.def(
        "optimal_constant_scale",
        [](const Graph& g, const Eigen::VectorXd& z0, const Eigen::VectorXd& shape, bool squared) {
            return optimal_constant_scale(edge_vector(z0, oriented_incidence(g)), make_shape(shape, squared));
        },
        py::arg("graph"), py::arg("z0"), py::arg("shape"), py::arg("squared") = true);
    m.def(
        "constant_cost",
        [](const Graph& g, const Eigen::VectorXd& z0, const Eigen::VectorXd& shape, double sc, bool squared) {
            return constant_cost_closed_form(edge_vector(z0, oriented_incidence(g)), make_shape(shape, squared), sc);
        },
        py::arg("graph"), py::arg("z0"), py::arg("shape"), py::arg("sc"), py::arg("squared") = true);
    m.def(
        "scale_function",
        [](const Graph& g, const Eigen::VectorXd& z, const Eigen::VectorXd& shape, bool squared) {
            return scale_function(z, ControllerArtifacts::build(g, make_shape(shape, squared))).scale;
        },
        py::arg("graph"), py::arg("z"), py::arg("shape"), py::arg("squared") = true);
    m.def(
        "control_varying",
        [](const Graph& g, const Eigen::VectorXd& z, const Eigen::VectorXd& shape, bool squared) {
            return control_varying(z, ControllerArtifacts::build(g, make_shape(shape, squared)));
        },
        py::arg("graph"), py::arg("z"), py::arg("shape"), py::arg("squared") = true);

    m.def(
        "simulate",
        [](const py::object& config) {
            const ExperimentConfig cfg = parse_config(from_python(config));
            Trajectory traj;
            RunSummary summary;
            {
                py::gil_scoped_release release;
                summary = simulate(cfg, &traj);
            }
            py::dict out = to_python(summary.to_json()).cast<py::dict>();
            out["trajectory"] = trajectory_arrays(traj);
            return out;
        },
        py::arg("config"), "Run one configuration given as a dict in the config-file layout.");
    m.def(
        "reproduce",
        [](const std::string& table, const std::filesystem::path& out_dir, int parallel) {
            Overrides ov;
            ov.parallel = parallel;
            RunOutcome out;
            {
                py::gil_scoped_release release;
                out = reproduce(table, out_dir, ov);
            }
            py::list runs;
            for (const auto& r : out.runs) runs.append(to_python(r.to_json()));
            py::dict d;
            d["ok"] = out.ok;
            d["runs"] = runs;
            return d;
        },
        py::arg("table"), py::arg("out_dir"), py::arg("parallel") = 1);

    m.def("optimal_angles", &optimal_angles);
    m.def("fisher_determinant", &fisher_determinant, py::arg("angles"), py::arg("r") = 1.0, py::arg("sigma") = 1.0);
    m.def("determinant_gap", &determinant_gap, py::arg("angles"), py::arg("r") = 1.0, py::arg("sigma") = 1.0);
    m.def("delta_inverse", &delta_inverse);
    m.def(
        "subtended_angles",
        [](const Eigen::Matrix<double, 3, 2>& sensors, const Eigen::Vector2d& target) {
            SensorScene scene;
            for (int i = 0; i < 3; ++i) scene.sensors[i] = sensors.row(i).transpose();
            scene.target = target;
            return subtended_angles(scene);
        },
        py::arg("sensors"), py::arg("target"));
    m.def(
        "monotonicity_check",
        [](double step) {
            const MonotonicityReport rep = monotonicity_check(step);
            return py::make_tuple(rep.points, rep.violations.size());
        },
        py::arg("step") = 0.01, "Returns (grid points, violations).");
}
