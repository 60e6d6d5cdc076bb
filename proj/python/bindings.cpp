#include "scarforge/analytic.hpp"
#include "scarforge/cutoff.hpp"
#include "scarforge/errors.hpp"
#include "scarforge/experiment.hpp"
#include "scarforge/fock.hpp"
#include "scarforge/grid1d.hpp"
#include "scarforge/qnf.hpp"
#include "scarforge/quasimode.hpp"
#include "scarforge/scarscan.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace scarforge;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hyperbolic quasimode and scar-weight numerics";

    auto base = py::register_exception<Error>(m, "ScarforgeError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
    py::register_exception<ValidityError>(m, "ValidityError", base.ptr());
    py::register_exception<InvalidDimension>(m, "InvalidDimension", base.ptr());
    py::register_exception<UnsupportedOrder>(m, "UnsupportedOrder", base.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<EhrenfestOverflow>(m, "EhrenfestOverflow", base.ptr());

    // number basis
    m.def("squeezed_vacuum",
          [](double beta, int dim, double hbar) { return fock::squeezed_vacuum(beta, dim, hbar).coeffs; },
          py::arg("beta"), py::arg("dim"), py::arg("hbar") = 1.0);
    m.def("dilate",
          [](double beta, const Eigen::VectorXcd& coeffs, double hbar) {
              return fock::dilate(beta, fock::FockState{coeffs, hbar}).coeffs;
          },
          py::arg("beta"), py::arg("coeffs"), py::arg("hbar") = 1.0);
    m.def("moyal_c", [](int alpha) { return fock::xxi_power_decomposition(alpha).c_coeffs; },
          py::arg("alpha"));

    // closed forms
    m.def("overlap_kernel", [](int m1, int m2, double beta) { return analytic::overlap_kernel(m1, m2)(beta); },
          py::arg("m1"), py::arg("m2"), py::arg("beta"));
    m.def("overlap_expression", [](int m1, int m2) { return analytic::overlap_kernel(m1, m2).expression(); },
          py::arg("m1"), py::arg("m2"));
    m.def("s1", &analytic::s1, py::arg("q1"), py::arg("theta"));
    m.def("s1_quadrature", &analytic::s1_quadrature, py::arg("q1"), py::arg("theta"),
          py::arg("tol") = 1e-13);

    // normal form and quasimodes
    m.def("ehrenfest_time", &qnf::ehrenfest_time, py::arg("epsilon_prime"), py::arg("lambda_") = 1.0,
          py::arg("hbar"));
    m.def("width_law_limit", &quasimode::width_law_limit, py::arg("lambda_"), py::arg("epsilon_prime"));
    m.def("optimize_cutoff",
          [](double eps, int grid_size) {
              const auto chi = quasimode::optimize_cutoff(eps, grid_size);
              py::dict d;
              d["values"] = chi.values();
              d["derivatives"] = chi.derivatives();
              d["rayleigh_quotient"] = chi.rayleigh_quotient();
              d["norm_sq"] = chi.norm_sq();
              d["shrink"] = chi.shrink;
              d["mollifier_radius"] = chi.mollifier_radius;
              return d;
          },
          py::arg("epsilon_prime"), py::arg("grid_size") = 4097);
    m.def("quasimode_gram",
          [](double q1, double eps, double T, double theta, double hbar) {
              const auto r = quasimode::quasimode_gram(q1, quasimode::optimize_cutoff(eps), T, theta, hbar);
              py::dict d;
              d["norm_sq"] = r.norm_sq;
              d["predicted_norm_sq"] = r.predicted_norm_sq;
              d["width"] = r.width;
              d["predicted_width"] = r.predicted_width;
              return d;
          },
          py::arg("q1"), py::arg("epsilon_prime"), py::arg("T"), py::arg("theta") = 0.0,
          py::arg("hbar") = 1e-3);

    // scar weights
    m.def("default_C_gamma", &scarscan::default_C_gamma, py::arg("epsilon_prime"));
    m.def("mass_bound", &scarscan::mass_bound, py::arg("c2"), py::arg("K"), py::arg("C_gamma"));
    m.def("optimize_weight",
          [](double eps, double C) {
              const auto w = scarscan::optimize_weight(eps, C);
              py::dict d;
              d["c2"] = w.c2;
              d["K"] = w.K;
              d["bound"] = w.bound;
              d["continuous_c2"] = w.continuous_c2;
              d["continuous_bound"] = w.continuous_bound;
              return d;
          },
          py::arg("epsilon"), py::arg("C_gamma"));
    m.def("pendulum_scar",
          [](double hbar, double eps_prime, double eps, int n_grid) {
              scarscan::PendulumScarReport r;
              {
                  py::gil_scoped_release release;
                  r = scarscan::pendulum_scar(hbar, eps_prime, eps, n_grid);
              }
              py::dict d;
              d["T"] = r.T;
              d["E_center"] = r.E_center;
              d["quasimode_width_normalized"] = r.quasimode_width_normalized;
              d["quasimode_box_mass"] = r.quasimode_box_mass;
              d["c2"] = r.weight.c2;
              d["K"] = r.weight.K;
              d["chosen_k"] = r.weight.chosen_k;
              d["projected_mass"] = r.weight.projected_mass;
              d["mass_bound"] = r.weight.mass_bound;
              d["scar_mass"] = r.weight.scar_mass;
              d["width_achieved"] = r.weight.width_achieved;
              d["width_limit"] = r.weight.width_limit;
              return d;
          },
          py::arg("hbar"), py::arg("epsilon_prime") = 0.1, py::arg("epsilon") = 0.5, py::arg("n_grid") = 0);

    // experiment harness
    m.def("pipeline_names", &experiment::pipeline_names);
    m.def("run_experiment",
          [](const std::string& yaml_text, const std::string& out_dir) {
              auto cfg = experiment::parse_config(yaml_text);
              experiment::RunReport rep;
              {
                  py::gil_scoped_release release;
                  rep = experiment::run_experiment(cfg, out_dir);
              }
              py::dict checks;
              for (const auto& c : rep.result.checks) checks[py::str(c.name)] = c.enabled ? py::object(py::bool_(c.pass)) : py::object(py::none());
              py::dict d;
              d["all_pass"] = rep.all_pass;
              d["checks"] = checks;
              d["failures"] = rep.result.failures;
              d["manifest"] = rep.manifest.string();
              d["wall_time_s"] = rep.wall_time_s;
              return d;
          },
          py::arg("config_yaml"), py::arg("out_dir"));
}
