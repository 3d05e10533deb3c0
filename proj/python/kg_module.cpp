// Python bindings for the core operations.

#include "kg/bounds.hpp"
#include "kg/error.hpp"
#include "kg/harness.hpp"
#include "kg/models.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kg;

namespace {

ModelSpec make_spec(const Matrix& u_squared, const Matrix& v, const std::string& label) {
  return ModelSpec(SymmetricMatrix(u_squared), SymmetricMatrix(v), label);
}

py::dict kappa_dict(const KappaBundle& k) {
  py::dict d;
  d["b"] = k.b;
  d["c"] = k.c;
  d["general"] = k.general.value;
  d["sum"] = k.sum.value;
  d["norm_product"] = k.norm_product.value;
  if (k.relative) d["relative"] = k.relative->value;
  if (k.disjoint) d["disjoint"] = k.disjoint->value;
  if (k.signed_pair) d["signed"] = py::make_tuple(k.signed_pair->minus, k.signed_pair->plus);
  d["structured"] = py::make_tuple(k.structured.minus, k.structured.plus);
  d["exact"] = py::make_tuple(k.exact.minus, k.exact.plus);
  d["kappa0_hat"] = k.kappa0_hat;
  d["kappa_prime_hat"] = k.kappa_prime_hat;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kleingordon, m) {
  m.doc() = "Klein-Gordon block operator spectra and relative perturbation bounds";

  py::register_exception<Error>(m, "KleinGordonError");

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_spec), py::arg("u_squared"), py::arg("v"), py::arg("label") = "")
      .def_property_readonly("u_squared", [](const ModelSpec& s) { return s.u_squared().matrix(); })
      .def_property_readonly("v", [](const ModelSpec& s) { return s.v().matrix(); })
      .def_property_readonly("label", &ModelSpec::label)
      .def_property_readonly("order", &ModelSpec::order)
      .def("__eq__", [](const ModelSpec& a, const ModelSpec& b) { return a == b; });

  m.def("square_well_model", [](double tau) { return square_well_model({tau, std::nullopt}); }, py::arg("tau"));
  m.def(
      "harmonic_model",
      [](double alpha, double beta, int grid_points, double half_width) {
        return harmonic_model({alpha, beta, grid_points, half_width});
      },
      py::arg("alpha"), py::arg("beta") = 0.0, py::arg("grid_points") = 1000, py::arg("half_width") = 12.0);
  m.def("square_well_perturbation", [](double eta) { return square_well_perturbation(eta).matrix(); }, py::arg("eta"));
  m.def(
      "exact_harmonic_eigs",
      [](double alpha, double beta, int n) {
        const HarmonicEigenvalues e = exact_harmonic_eigs(alpha, beta, n);
        return py::make_tuple(e.mu_plus, e.mu_minus);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("n"));
  m.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"));
  m.def("save_model", [](const ModelSpec& s, const std::string& path) { save_model(s, path); }, py::arg("spec"),
        py::arg("path"));

  m.def("contraction_bound", &contraction_bound, py::arg("spec"), py::arg("shift"));
  m.def(
      "optimize_shift",
      [](const ModelSpec& s) {
        const ShiftOptimum o = optimize_shift(s);
        return py::make_tuple(o.shift, o.contraction);
      },
      py::arg("spec"));

  m.def(
      "spectrum",
      [](const ModelSpec& s, double shift) {
        const SpectrumResult r = run_spectrum(s, shift);
        py::dict d;
        d["eigenvalues"] = r.report.eigenvalues;
        std::vector<std::string> types;
        std::vector<double> residuals;
        for (const auto& row : r.rows) {
          types.emplace_back(to_string(row.sign_type));
          residuals.push_back(row.pencil_residual);
        }
        d["sign_types"] = types;
        d["pencil_residuals"] = residuals;
        d["is_real"] = r.report.is_real_spectrum;
        d["defective"] = r.report.defective;
        d["contraction"] = r.contraction;
        d["path"] = std::string(to_string(r.report.path));
        return d;
      },
      py::arg("spec"), py::arg("shift") = 0.0);
  m.def("pencil_residual", &pencil_residual, py::arg("spec"), py::arg("lam"));

  m.def(
      "bounds",
      [](const ModelSpec& s, const Matrix& delta_v, double shift) {
        const SymmetricMatrix dv(delta_v);
        const BoundsResult r = run_bounds(s, dv, shift, 0.0);
        py::dict d = kappa_dict(r.bundle);
        d["gap_alpha"] = r.gap_alpha;
        d["norm_j1"] = r.norm_j1;
        d["gap"] = py::make_tuple(r.gap.lower, r.gap.upper);
        return d;
      },
      py::arg("spec"), py::arg("delta_v"), py::arg("shift"));
  m.def(
      "verify",
      [](const ModelSpec& s, const Matrix& delta_v, double shift) {
        const VerificationReport r = verify_bounds(s, SymmetricMatrix(delta_v), shift);
        py::dict d;
        d["max_deviation"] = r.max_deviation;
        d["all_pass"] = r.all_applicable_pass();
        py::dict checks;
        for (const auto& c : r.checks) checks[c.name.c_str()] = py::make_tuple(c.value, c.applicable, c.pass);
        d["checks"] = checks;
        return d;
      },
      py::arg("spec"), py::arg("delta_v"), py::arg("shift"));
  m.def("t_bound", &t_bound, py::arg("a"), py::arg("norm_b"));
  m.def(
      "rescale_kappa",
      [](double km, double kp) {
        const Rescaling r = rescale_kappa(km, kp);
        return py::make_tuple(r.kappa0_hat, r.kappa_prime_hat);
      },
      py::arg("kappa_minus"), py::arg("kappa_plus"));

  m.def(
      "sweep",
      [](const ModelSpec& base, const Matrix& direction, double lo, double hi, int steps) {
        const SweepResult r = run_sweep(base, SymmetricMatrix(direction), lo, hi, steps);
        py::dict d;
        std::vector<double> params;
        std::vector<bool> real;
        for (const auto& p : r.points) {
          params.push_back(p.parameter);
          real.push_back(p.real);
        }
        d["parameters"] = params;
        d["real"] = real;
        d["critical_value"] = r.critical_value;
        return d;
      },
      py::arg("base"), py::arg("direction"), py::arg("lo"), py::arg("hi"), py::arg("steps"));

  m.def("example2", [] {
    const Example2Result r = reproduce_example2();
    py::dict d;
    d["distances"] = r.distances;
    d["bounds"] = r.bounds;
    d["contraction"] = r.contraction;
    d["v_u_inv_ratio"] = r.v_u_inv_ratio;
    d["v_u2_inv_ratio"] = r.v_u2_inv_ratio;
    d["notes"] = r.notes;
    return d;
  });
}
