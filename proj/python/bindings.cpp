// Python bindings over the core operations: kernels and their Fourier
// symbols, explicit minimizers with Frostman certification, the limiting
// center-of-mass ODE, and config round-tripping.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swarmlab/asymptotic.hpp"
#include "swarmlab/config.hpp"
#include "swarmlab/diagnostics.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/kernels.hpp"
#include "swarmlab/minimizers.hpp"
#include "swarmlab/simulator.hpp"

namespace py = pybind11;
using namespace swarmlab;

namespace {

py::dict h2b_to_dict(const H2bReport& r) {
  py::dict d;
  d["holds"] = r.holds;
  d["kappa"] = r.kappa;
  d["kappa_required"] = r.kappa_required;
  d["worst_margin"] = r.worst_margin;
  d["worst_xi"] = r.worst_xi;
  return d;
}

py::dict frostman_to_dict(const FrostmanReport& r) {
  py::dict d;
  d["A0"] = r.A0;
  d["max_interior_deviation"] = r.max_interior_deviation;
  d["min_exterior_slack"] = r.min_exterior_slack;
  d["boundary_exponent_fit"] = r.boundary_exponent_fit;
  d["certified"] = r.certified;
  d["tolerance"] = r.tolerance;
  return d;
}

}  // namespace

PYBIND11_MODULE(_swarmlab, m) {
  m.doc() = "attraction-repulsion swarm laboratory core";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<CertificationError>(m, "CertificationError");
  py::register_exception<InstabilityError>(m, "InstabilityError");

  py::enum_<PerturbationKind>(m, "PerturbationKind")
      .value("none", PerturbationKind::none)
      .value("gaussian", PerturbationKind::gaussian);

  py::class_<PerturbationSpec>(m, "PerturbationSpec")
      .def(py::init<>())
      .def_readwrite("kind", &PerturbationSpec::kind)
      .def_readwrite("c", &PerturbationSpec::c)
      .def_readwrite("sigma_w", &PerturbationSpec::sigma_w);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init<>())
      .def_readwrite("dim", &KernelSpec::dim)
      .def_readwrite("s", &KernelSpec::s)
      .def_readwrite("alpha", &KernelSpec::alpha)
      .def_readwrite("beta", &KernelSpec::beta)
      .def_readwrite("lam", &KernelSpec::lambda)
      .def_readwrite("perturbation", &KernelSpec::perturbation)
      .def_readwrite("delta", &KernelSpec::delta)
      .def("log_case", &KernelSpec::log_case)
      .def("validate", &KernelSpec::validate);

  m.def("sigma_constant", &sigma_constant, py::arg("dim"), py::arg("s"));
  m.def("Es_fourier", &Es_fourier, py::arg("s"), py::arg("xi_norm"));
  m.def("w_hat", &w_hat, py::arg("kernel"), py::arg("xi_norm"));
  m.def("kappa_min", &kappa_min, py::arg("kernel"));
  m.def(
      "check_H2b",
      [](const KernelSpec& k, double kappa) {
        return h2b_to_dict(check_H2b(k, kappa));
      },
      py::arg("kernel"), py::arg("kappa"));

  m.def(
      "eval_Es",
      [](const KernelSpec& k, const Point& x) { return eval_Es(k, x.data()); },
      py::arg("kernel"), py::arg("x"));
  m.def(
      "eval_W",
      [](const KernelSpec& k, const Point& x) { return eval_W(k, x.data()); },
      py::arg("kernel"), py::arg("x"));
  m.def(
      "grad_W",
      [](const KernelSpec& k, const Point& x) {
        Point g{};
        grad_W(k, x.data(), g.data());
        return g;
      },
      py::arg("kernel"), py::arg("x"));

  py::class_<MinimizerProfile>(m, "MinimizerProfile")
      .def_property_readonly(
          "variant",
          [](const MinimizerProfile& p) {
            return std::string(profile_variant_name(p.variant));
          })
      .def_readonly("dim", &MinimizerProfile::dim)
      .def_readonly("s", &MinimizerProfile::s)
      .def_readonly("mass", &MinimizerProfile::mass)
      .def_readonly("amplitude", &MinimizerProfile::amplitude)
      .def_readonly("exponent", &MinimizerProfile::exponent)
      .def_readonly("radius", &MinimizerProfile::radius)
      .def_readonly("semi_axes", &MinimizerProfile::semi_axes)
      .def_readonly("points", &MinimizerProfile::points)
      .def_readonly("point_weight", &MinimizerProfile::point_weight)
      .def("density", &MinimizerProfile::density, py::arg("x"))
      .def("bounding_radius", &MinimizerProfile::bounding_radius)
      .def("second_moment_axis", &MinimizerProfile::second_moment_axis,
           py::arg("j"));

  m.def("explicit_radial_minimizer", &explicit_radial_minimizer,
        py::arg("kernel"), py::arg("mass"));
  m.def(
      "ellipsoid_shape_from_lambda",
      [](const KernelSpec& k, double mass) {
        EllipsoidSolveStats stats{};
        MinimizerProfile p = ellipsoid_shape_from_lambda(k, mass, &stats);
        py::dict d;
        d["iterations"] = stats.iterations;
        d["residual"] = stats.residual;
        d["hessian_definite"] = stats.hessian_definite;
        return py::make_tuple(p, d);
      },
      py::arg("kernel"), py::arg("mass"));
  m.def("zeta", &zeta, py::arg("r"), py::arg("kernel"), py::arg("mass"));
  m.def("grad_zeta", &grad_zeta, py::arg("r"), py::arg("kernel"),
        py::arg("mass"));
  m.def("zeta_closed_form_s1", &zeta_closed_form_s1, py::arg("r"));
  m.def(
      "minimizer_1d_profile",
      [](double s) {
        Profile1dResult r = minimizer_1d_profile(s);
        Frostman1dReport rep = frostman_1d_check(r);
        py::dict d;
        d["profile"] = r.profile;
        d["R_s"] = r.R_s;
        d["C_s"] = r.C_s;
        d["V1"] = r.V1;
        d["valid"] = r.valid;
        d["warning"] = r.warning;
        d["max_relative_deviation"] = rep.max_relative_deviation;
        d["mass_error"] = rep.mass_error;
        return d;
      },
      py::arg("s"));
  m.def(
      "frostman_check",
      [](const MinimizerProfile& prof, const KernelSpec& k, int n_interior,
         int n_exterior, int n_collar, std::uint64_t seed,
         double interior_tol) {
        ProbeGrid probe =
            default_probe_grid(prof, n_interior, n_exterior, n_collar, seed);
        return frostman_to_dict(
            frostman_check(prof, k, probe, interior_tol));
      },
      py::arg("profile"), py::arg("kernel"), py::arg("n_interior") = 200,
      py::arg("n_exterior") = 120, py::arg("n_collar") = 48,
      py::arg("seed") = 1, py::arg("interior_tol") = 1e-3);
  m.def("potential_at", &potential_at, py::arg("profile"), py::arg("kernel"),
        py::arg("x"), py::arg("rel_tol") = 1e-9);
  m.def("profile_energy", &profile_energy, py::arg("profile"),
        py::arg("kernel"), py::arg("rel_tol") = 1e-8);
  m.def(
      "gradient_flow_minimizer",
      [](const KernelSpec& k, double mass, int n, int max_steps,
         std::uint64_t seed) {
        GradientFlowOptions opt;
        opt.n = n;
        opt.max_steps = max_steps;
        opt.seed = seed;
        GradientFlowResult r = gradient_flow_minimizer(k, mass, opt);
        py::dict d;
        d["profile"] = r.cloud;
        d["energy"] = r.energy;
        d["support_radius"] = r.support_radius;
        d["aspect_ratio"] = r.aspect_ratio;
        return d;
      },
      py::arg("kernel"), py::arg("mass"), py::arg("n") = 400,
      py::arg("max_steps") = 400, py::arg("seed") = 1);

  m.def(
      "interaction_energy",
      [](const std::vector<Point>& pts, const std::vector<double>& w,
         const KernelSpec& k, int dim) {
        return interaction_energy(pts, w, k, dim);
      },
      py::arg("points"), py::arg("weights"), py::arg("kernel"),
      py::arg("dim"));

  py::enum_<FieldKind>(m, "FieldKind")
      .value("zero", FieldKind::zero)
      .value("constant", FieldKind::constant)
      .value("linear", FieldKind::linear)
      .value("rotation", FieldKind::rotation);

  py::class_<ExternalFieldSpec>(m, "ExternalFieldSpec")
      .def(py::init<>())
      .def_readwrite("kind", &ExternalFieldSpec::kind)
      .def_readwrite("offset", &ExternalFieldSpec::offset)
      .def_readwrite("matrix", &ExternalFieldSpec::matrix)
      .def_readwrite("omega", &ExternalFieldSpec::omega)
      .def("eval", &ExternalFieldSpec::eval, py::arg("x"), py::arg("dim"));

  m.def("g_of_X", &g_of_X, py::arg("profile"), py::arg("u_ext"), py::arg("X"),
        py::arg("t") = 0.0);
  m.def(
      "integrate_xv",
      [](const MinimizerProfile& prof, const ExternalFieldSpec& field,
         double lambda, const Point& X0, const Point& V0, double t_final,
         double dt) {
        LimitTrajectory tr =
            integrate_xv(prof, field, lambda, X0, V0, t_final, dt);
        py::dict d;
        d["times"] = tr.times;
        d["X"] = tr.X;
        d["V"] = tr.V;
        return d;
      },
      py::arg("profile"), py::arg("field"), py::arg("lambda_drag"),
      py::arg("X0"), py::arg("V0"), py::arg("t_final"), py::arg("dt"));

  m.def("parse_config", [](const std::string& text) {
    return serialize_config(parse_config_text(text));
  });
  m.def("load_config", [](const std::string& path) {
    return serialize_config(load_config(path));
  });
}
