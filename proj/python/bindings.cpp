#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "orlicz/errors.hpp"
#include "orlicz/frac_modular.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/psi.hpp"
#include "orlicz/singular_solver.hpp"
#include "orlicz/version.hpp"

namespace py = pybind11;
using namespace orlicz;
using nlohmann::json;

namespace {

NFunction nf_from(const std::string& text) { return NFunction::from_json(json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Orlicz N-functions, the limit function Psi and singular variational problems";
  m.attr("__version__") = kVersion;

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<NonFinite>(m, "NonFinite", PyExc_OverflowError);

  py::class_<NFunction>(m, "NFunction")
      .def_static("from_json", &nf_from, py::arg("text"))
      .def("to_json", [](const NFunction& nf) { return nf.to_json().dump(); })
      .def("describe", &NFunction::describe)
      .def("value", &NFunction::value, py::arg("t"))
      .def("derivative", &NFunction::derivative, py::arg("t"))
      .def("phi", &NFunction::phi, py::arg("t"))
      .def("conjugate", [](const NFunction& nf, double s) { return conjugate_eval(nf, s); }, py::arg("s"))
      .def("young_gap", [](const NFunction& nf, double s, double t) { return young_gap(nf, s, t).gap; },
           py::arg("s"), py::arg("t"))
      .def("indices",
           [](const NFunction& nf) {
             const SobolevIndices idx = sobolev_indices(nf);
             return py::make_tuple(idx.ell, idx.m);
           })
      .def("__repr__", &NFunction::describe);

  m.def("psi", [](const NFunction& nf, int dim, double t) { return psi_eval(PsiFunction(nf, dim), t); },
        py::arg("nf"), py::arg("dim"), py::arg("t"));
  m.def("psi_closed_form", &psi_closed_form, py::arg("nf"), py::arg("dim"), py::arg("t"));
  m.def("sphere_moment", [](int dim, double p) { return sphere_moment(dim, p).value; }, py::arg("dim"),
        py::arg("p"));

  m.def("modular",
        [](const NFunction& nf, double s, std::vector<double> u) {
          const int n = static_cast<int>(u.size());
          return FracContext(GridDomain::make(1, n, n), nf, s).value(u);
        },
        py::arg("nf"), py::arg("s"), py::arg("u"), "1-D fractional modular of interior values u");
  m.def("gradient",
        [](const NFunction& nf, double s, std::vector<double> u) {
          const int n = static_cast<int>(u.size());
          return energy_gradient(FracContext(GridDomain::make(1, n, n), nf, s), u);
        },
        py::arg("nf"), py::arg("s"), py::arg("u"));

  m.def("solve",
        [](const std::string& problem) {
          const SingularProblem p = SingularProblem::from_json(json::parse(problem));
          SolveReport r;
          {
            py::gil_scoped_release release;
            r = minimize(p);
          }
          json out = r.to_json();
          out["certificates"] = compute_certificates(r, p).to_json();
          out["u"] = r.u.values;
          return out.dump();
        },
        py::arg("problem"), "Solve a problem given as JSON text; returns the report as JSON text");
}
