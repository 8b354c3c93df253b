// Python bindings: Φ-function evaluation, ball capacities and the CLI tasks.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "orlicz/capacity.hpp"
#include "orlicz/cli.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/phi.hpp"

namespace py = pybind11;
using namespace orlicz;

namespace {

PhiFunction parse_phi(const std::string& spec) {
  auto s = cli::parse_config("phi = " + spec, "<phi>");
  return *s.phi;
}

cli::TaskOutput run(const std::string& task, const std::string& config) {
  auto s = cli::parse_config(config);
  const auto t = cli::parse_task(task);
  if (!t) throw ConfigError("unknown task '" + task + "'", "task");
  if (!s.task_defaulted && s.task != *t) throw ConfigError("config names a different task", "task");
  s.task = *t;
  cli::validate(s);
  py::gil_scoped_release release;
  return cli::run_task(s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Orlicz-Sobolev regularity toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<RefinementError>(m, "RefinementError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<PhiFunction>(m, "Phi")
      .def(py::init(&parse_phi), py::arg("spec"), "Parse a Φ-function from config syntax, e.g. 'power(2)'.")
      .def("G", [](const PhiFunction& p, double x, double y, double t) { return eval_G(p, {x, y}, t); })
      .def("g", [](const PhiFunction& p, double x, double y, double t) { return eval_g(p, {x, y}, t); })
      .def("g_inverse", [](const PhiFunction& p, double x, double y, double s) { return eval_g_inverse(p, {x, y}, s); })
      .def("conjugate", [](const PhiFunction& p, double x, double y, double s) { return eval_conjugate(p, {x, y}, s); })
      .def_property_readonly("sc_constants",
                             [](const PhiFunction& p) { return py::make_tuple(p.sc_constants().lower, p.sc_constants().upper); })
      .def_property_readonly("spec", &PhiFunction::spec)
      .def("__repr__", [](const PhiFunction& p) { return "Phi('" + p.spec() + "')"; });

  m.def(
      "ball_capacity",
      [](const PhiFunction& phi, double x, double y, double r, double sigma, int nodes_per_radius) {
        const auto c = ball_capacity(phi, {x, y}, r, sigma, nodes_per_radius);
        return py::make_tuple(c.value, c.converged);
      },
      py::arg("phi"), py::arg("x"), py::arg("y"), py::arg("r"), py::arg("sigma") = 2.0, py::arg("nodes_per_radius") = 32,
      "Discrete capacity of B(x,r) relative to B(x,σr); returns (value, converged).");

  m.def(
      "ball_capacity_bounds",
      [](const PhiFunction& phi, double x, double y, double r, double sigma) {
        const auto b = ball_capacity_bounds(phi, {x, y}, r, sigma);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("phi"), py::arg("x"), py::arg("y"), py::arg("r"), py::arg("sigma") = 2.0);

  m.def(
      "run_task_json",
      [](const std::string& task, const std::string& config) {
        const auto out = run(task, config);
        return out.report.dump();
      },
      py::arg("task"), py::arg("config"), "Run a CLI task on config text; returns the JSON report as a string.");

  m.def(
      "run_task_artifacts",
      [](const std::string& task, const std::string& config) {
        auto out = run(task, config);
        py::dict files;
        for (auto& a : out.artifacts) files[py::str(a.name)] = py::bytes(a.content);
        return py::make_tuple(out.converged, files);
      },
      py::arg("task"), py::arg("config"));

  m.def("sha256", [](const py::bytes& b) { return cli::sha256_hex(std::string(b)); });
}
