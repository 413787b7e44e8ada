// Python bindings for the nPBE library: solver, constants, sparse grids,
// error bounds and the scalar shooting problem.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "npbe/constants.hpp"
#include "npbe/error.hpp"
#include "npbe/error_bounds.hpp"
#include "npbe/picard.hpp"
#include "npbe/radial_ode.hpp"
#include "npbe/smolyak.hpp"

namespace py = pybind11;

namespace {

py::dict solve_constant(int dim, double lower, double upper, int nodes, double eps, double kappa_sq, double source,
                        double boundary, double tol, std::size_t max_iter) {
  const npbe::Grid g = npbe::build_grid(dim, lower, upper, nodes);
  const npbe::NpbeProblem p(npbe::ScalarField(g, eps), npbe::ScalarField(g, kappa_sq), npbe::ScalarField(g, source),
                            npbe::ScalarField(g, boundary));
  npbe::PicardOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  const auto r = npbe::picard_solve(p, opt);
  py::dict out;
  out["u"] = std::vector<double>(r.u.values().begin(), r.u.values().end());
  out["history"] = r.history;
  out["residual"] = r.residual;
  out["converged"] = r.converged;
  out["iterations"] = r.iterations;
  out["rho_obs"] = r.rho_obs;
  return out;
}

py::tuple sparse_grid(int dim, int level) {
  const auto g = npbe::build_sparse_grid(dim, level);
  std::vector<std::vector<double>> nodes;
  nodes.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) nodes.emplace_back(g.node(k).begin(), g.node(k).end());
  return py::make_tuple(nodes, g.weights());
}

py::tuple predict_error(int dim, double sigma_hat, double m_tilde, int level, double eta) {
  const auto e = npbe::predict_error(npbe::bound_constants(dim, sigma_hat, m_tilde), level, eta);
  return py::make_tuple(npbe::to_string(e.regime), e.bound);
}

py::dict small_data_bounds(double c_h, double c_s, double kappa_inf_sq, double volume) {
  const auto b = npbe::m0_y0star(c_h, c_s, kappa_inf_sq, volume);
  py::dict out;
  out["beta"] = b.beta;
  out["M0"] = b.m0;
  out["y0_star"] = b.y0_star;
  out["linear_case"] = b.linear_case;
  return out;
}

py::object shoot(double eta) {
  const auto s = npbe::shoot_scalar_npbe(eta);
  if (!s) return py::none();
  py::dict out;
  out["slope"] = s->slope;
  out["x"] = s->x;
  out["u"] = s->u;
  out["sup_norm"] = s->sup_norm;
  out["l2_norm"] = s->l2_norm;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlinear Poisson-Boltzmann lab";
  m.attr("__version__") = NPBE_VERSION;
  py::register_exception<npbe::Error>(m, "NpbeError", PyExc_ValueError);

  m.def("solve_constant", &solve_constant, py::arg("dim"), py::arg("lower"), py::arg("upper"), py::arg("nodes"),
        py::arg("eps") = 1.0, py::arg("kappa_sq") = 1.0, py::arg("source") = 0.0, py::arg("boundary") = 0.0,
        py::arg("tol") = 1e-10, py::arg("max_iter") = 200,
        "Picard solve on a box with constant coefficients and data.");
  m.def("sparse_grid", &sparse_grid, py::arg("dim"), py::arg("level"),
        "Nodes and quadrature weights of the Clenshaw-Curtis Smolyak grid.");
  m.def("predict_error", &predict_error, py::arg("dim"), py::arg("sigma_hat"), py::arg("m_tilde"), py::arg("level"),
        py::arg("eta"), "Regime name and a-priori sparse-grid error bound.");
  m.def("small_data_bounds", &small_data_bounds, py::arg("c_h"), py::arg("c_s"), py::arg("kappa_inf_sq"),
        py::arg("volume"), "Uniqueness radius M0 and data threshold y0*.");
  m.def("contraction_bound", &npbe::contraction_bound, py::arg("m"), py::arg("c_h"), py::arg("c_s"),
        py::arg("kappa_inf_sq"), py::arg("volume"));
  m.def("shoot", &shoot, py::arg("eta"), "Nontrivial solution of the scalar problem on (0, pi), or None.");
}
