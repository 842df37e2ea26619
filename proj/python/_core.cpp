// Python bindings: metrics by id or JSON, pointwise tensors as numpy arrays,
// Laplacians, integrals, checks and whole scenarios.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/builtins.hpp"
#include "finsler/checks.hpp"
#include "finsler/error.hpp"
#include "finsler/forms.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/scenario.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace finsler;

namespace {

json to_json(const py::handle& obj) {
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::object from_json(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

FinslerStructure metric_of(const py::handle& spec) {
  if (py::isinstance<FinslerStructure>(spec)) return spec.cast<FinslerStructure>();
  return builtins::metric_from_json(to_json(spec));
}

TangentPoint point(const FinslerStructure& s, const std::vector<double>& x, const std::vector<double>& y) {
  TangentPoint z{x, y};
  return point_from_json(json{{"x", z.x}, {"y", z.y}}, s.dim());
}

py::array_t<double> array(const TensorValue& t) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(t.rank()), t.dim);
  py::array_t<double> out(shape);
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

QuadratureGrid grid_of(const FinslerStructure& s, const py::handle& grid) {
  return QuadratureGrid::make(s, grid_from_json(to_json(grid), s.dim()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finsler geometry engine: Cartan connection, horizontal Hodge operators, SM quadrature";
  m.attr("__version__") = kEngineVersion;

  static py::exception<Error> error(m, "FinslerError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<FinslerStructure>(m, "Metric")
      .def_property_readonly("dim", &FinslerStructure::dim)
      .def_property_readonly("label", &FinslerStructure::label)
      .def("norm", [](const FinslerStructure& s, const std::vector<double>& x,
                      const std::vector<double>& y) { return s.norm(x, y); })
      .def("__repr__", [](const FinslerStructure& s) { return "<Metric " + s.label() + ">"; });

  m.def("metric", &metric_of, py::arg("spec"), "Built-in id or a metric JSON object.");

  m.def(
      "tensor",
      [](const py::handle& s, const std::string& name, const std::vector<double>& x, const std::vector<double>& y) {
        const auto f = metric_of(s);
        return array(named_tensor(f, name, point(f, x, y)));
      },
      py::arg("metric"), py::arg("name"), py::arg("x"), py::arg("y"));

  m.def(
      "curvature",
      [](const py::handle& s, const std::string& name, const std::vector<double>& x, const std::vector<double>& y) {
        const auto f = metric_of(s);
        return array(named_curvature(f, name, point(f, x, y)));
      },
      py::arg("metric"), py::arg("name"), py::arg("x"), py::arg("y"));

  m.def(
      "form",
      [](const py::handle& s, const std::string& id, const std::vector<double>& x, const std::vector<double>& y) {
        const auto f = metric_of(s);
        return array(form_values(f, builtins::form(id, f.dim()), point(f, x, y)));
      },
      py::arg("metric"), py::arg("form"), py::arg("x"), py::arg("y"), "Coefficients of a built-in form.");

  m.def(
      "laplacian",
      [](const py::handle& s, const std::string& id, const std::vector<double>& x, const std::vector<double>& y) {
        const auto f = metric_of(s);
        const auto lap = horizontal_laplacian(f, builtins::form(id, f.dim()));
        return array(form_values(f, lap, point(f, x, y)));
      },
      py::arg("metric"), py::arg("form"), py::arg("x"), py::arg("y"));

  m.def(
      "volume",
      [](const py::handle& s, const py::object& grid) {
        const auto f = metric_of(s);
        return integrate_scalar(f, [](const TangentPoint&) { return 1.0; }, grid_of(f, grid));
      },
      py::arg("metric"), py::arg("grid") = "default");

  m.def(
      "inner",
      [](const py::handle& s, const std::string& a, const std::string& b, const py::object& grid) {
        const auto f = metric_of(s);
        return global_inner_product(f, builtins::form(a, f.dim()), builtins::form(b, f.dim()), grid_of(f, grid));
      },
      py::arg("metric"), py::arg("a"), py::arg("b"), py::arg("grid") = "default", "Global inner product (a, b).");

  m.def(
      "harmonic",
      [](const py::handle& s, const std::string& id, const py::object& grid, double tol) {
        const auto f = metric_of(s);
        const auto h = is_h_harmonic(f, builtins::form(id, f.dim()), grid_of(f, grid), tol);
        py::dict d;
        d["laplacian_norm"] = h.laplacian_norm;
        d["dH_norm"] = h.dH_norm;
        d["deltaH_norm"] = h.deltaH_norm;
        d["form_norm"] = h.form_norm;
        d["energy_defect"] = h.energy_defect;
        d["derived_tol"] = h.derived_tol;
        d["harmonic"] = h.harmonic;
        d["equivalence_holds"] = h.equivalence_holds;
        return d;
      },
      py::arg("metric"), py::arg("form"), py::arg("grid") = "default", py::arg("tol") = 1e-8);

  m.def(
      "check",
      [](const py::handle& s, const std::string& name, const py::dict& params, std::uint64_t seed,
         const py::object& grid) {
        const auto f = metric_of(s);
        const auto o = checks::run(name, f, to_json(params), seed, grid_from_json(to_json(grid), f.dim()));
        py::dict d;
        d["max_residual"] = o.max_residual;
        d["items"] = o.items;
        d["detail"] = from_json(o.detail);
        return d;
      },
      py::arg("metric"), py::arg("name"), py::arg("params") = py::dict(), py::arg("seed") = 0,
      py::arg("grid") = "default", "Seeded verification suite; returns the worst residual.");

  m.def(
      "run_scenario",
      [](const py::handle& doc, bool timing) {
        const Scenario sc = py::isinstance<py::str>(doc) ? Scenario::load(doc.cast<std::string>())
                                                         : Scenario::parse(to_json(doc));
        return from_json(run_scenario(sc).to_json(timing));
      },
      py::arg("scenario"), py::arg("timing") = false, "Scenario dict or path to a scenario file; returns the report.");

  m.def("list_builtins", [] { return from_json(list_builtins()); });
}
