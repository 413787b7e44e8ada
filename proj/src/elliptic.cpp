#include "npbe/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npbe/error.hpp"

namespace npbe {

LinearOperator assemble_operator(const ScalarField& eps, const ScalarField& kappa_sq,
                                 FaceAveraging averaging) {
  require_same_grid(eps, kappa_sq, "assemble_operator");
  for (double e : eps.values()) {
    if (!(e > 0.0) || !std::isfinite(e))
      throw InvalidArgument("assemble_operator: dielectric must be positive and finite at every node");
  }
  for (double k : kappa_sq.values()) {
    if (!std::isfinite(k)) throw InvalidArgument("assemble_operator: kappa^2 must be finite");
  }

  LinearOperator op;
  op.grid_ = eps.grid();
  op.eps_ = eps;
  op.kappa_sq_ = kappa_sq;
  op.averaging_ = averaging;
  const Grid& g = op.grid_;
  const std::size_t n = g.node_count();

  for (int a = 0; a < g.dim(); ++a) {
    auto& face = op.face_[a];
    face.assign(n, 0.0);
    const auto s = g.stride(a);
    const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
    for (std::size_t idx = 0; idx < n; ++idx) {
      if (g.multi_index(idx)[a] == g.nodes(a) - 1) continue;
      const double e0 = eps[idx], e1 = eps[idx + s];
      const double ef = averaging == FaceAveraging::Arithmetic ? 0.5 * (e0 + e1) : 2.0 * e0 * e1 / (e0 + e1);
      face[idx] = ef * inv_h2;
    }
  }

  op.diag_.assign(n, 0.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (g.is_boundary(idx)) continue;
    op.interior_.push_back(idx);
    double d = kappa_sq[idx];
    for (int a = 0; a < g.dim(); ++a) d += op.face_[a][idx] + op.face_[a][idx - g.stride(a)];
    op.diag_[idx] = d;
  }
  return op;
}

void LinearOperator::apply(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const int dim = grid_.dim();
  for (std::size_t idx : interior_) {
    double v = diag_[idx] * u[idx];
    for (int a = 0; a < dim; ++a) {
      const auto s = grid_.stride(a);
      v -= face_[a][idx] * u[idx + s] + face_[a][idx - s] * u[idx - s];
    }
    out[idx] = v;
  }
}

ScalarField apply_operator(const LinearOperator& op, const ScalarField& field) {
  if (!(field.grid() == op.grid())) throw GridMismatch("apply_operator: field and operator grids differ");
  ScalarField out(op.grid());
  op.apply(field.values(), out.values());
  return out;
}

namespace {

double dot_interior(const std::vector<std::size_t>& interior, std::span<const double> a,
                    std::span<const double> b) {
  double s = 0.0;
  for (std::size_t idx : interior) s += a[idx] * b[idx];
  return s;
}

}  // namespace

LinearSolution solve_linear(const LinearOperator& op, const ScalarField& rhs,
                            const LinearSolveOptions& options) {
  const Grid& g = op.grid();
  if (!(rhs.grid() == g)) throw GridMismatch("solve_linear: rhs and operator grids differ");
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_linear: tolerance must be positive");

  const std::size_t n = g.node_count();
  const std::size_t max_iter = options.max_iter ? options.max_iter : 10 * n;

  std::vector<std::size_t> interior;
  interior.reserve(g.interior_count());
  for (std::size_t idx = 0; idx < n; ++idx)
    if (!g.is_boundary(idx)) interior.push_back(idx);

  LinearSolution result{ScalarField(g), 0, 0.0};
  std::vector<double> r(n, 0.0), z(n, 0.0), p(n, 0.0), q(n, 0.0);
  for (std::size_t idx : interior) r[idx] = rhs[idx];

  const double rhs_norm = std::sqrt(dot_interior(interior, r, r));
  if (rhs_norm == 0.0) return result;

  auto x = result.u.values();
  for (std::size_t idx : interior) {
    if (!(op.diagonal(idx) > 0.0))
      throw CoercivityError("solve_linear: non-positive diagonal entry; the coercivity condition "
                            "theta*lambda1 > mu fails");
    z[idx] = r[idx] / op.diagonal(idx);
  }
  p = z;
  double rz = dot_interior(interior, r, z);
  double res = 1.0;

  for (std::size_t it = 1; it <= max_iter; ++it) {
    op.apply(p, q);
    const double curvature = dot_interior(interior, p, q);
    if (!(curvature > 0.0))
      throw CoercivityError("solve_linear: operator is not positive definite (coercivity condition "
                            "theta*lambda1 > mu fails)");
    const double alpha = rz / curvature;
    for (std::size_t idx : interior) {
      x[idx] += alpha * p[idx];
      r[idx] -= alpha * q[idx];
    }
    res = std::sqrt(dot_interior(interior, r, r)) / rhs_norm;
    if (res <= options.tol) {
      result.iterations = it;
      result.relative_residual = res;
      return result;
    }
    for (std::size_t idx : interior) z[idx] = r[idx] / op.diagonal(idx);
    const double rz_new = dot_interior(interior, r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t idx : interior) p[idx] = z[idx] + beta * p[idx];
  }
  throw ConvergenceError("solve_linear: no convergence after " + std::to_string(max_iter) +
                             " iterations, relative residual " + std::to_string(res),
                         res);
}

ScalarField harmonic_lift(const Grid& grid, const ScalarField& boundary_values,
                          const LinearSolveOptions& options) {
  if (!(boundary_values.grid() == grid)) throw GridMismatch("harmonic_lift: boundary data grid differs");
  ScalarField g(grid);
  bool any = false;
  for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
    if (!grid.is_boundary(idx)) continue;
    if (!std::isfinite(boundary_values[idx])) throw InvalidArgument("harmonic_lift: non-finite boundary value");
    g[idx] = boundary_values[idx];
    any = any || g[idx] != 0.0;
  }
  if (!any) return g;

  // w = g_ext + v with -Lap v = Lap g_ext in the interior and v = 0 on the boundary.
  const auto laplace = assemble_operator(ScalarField(grid, 1.0), ScalarField(grid, 0.0));
  ScalarField rhs = apply_operator(laplace, g);
  for (auto& v : rhs.values()) v = -v;
  const auto v = solve_linear(laplace, rhs, options);
  for (std::size_t idx = 0; idx < grid.node_count(); ++idx)
    if (!grid.is_boundary(idx)) g[idx] = v.u[idx];
  return g;
}

}  // namespace npbe
