#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "npbe/grid.hpp"

namespace npbe {

/// How the dielectric is carried from nodes to cell faces.
enum class FaceAveraging { Arithmetic, Harmonic };

/// L u = -div(eps grad u) + kappa^2 u on a structured grid, discretized with a
/// flux-conservative 3/5/7-point stencil. Dirichlet rows are eliminated: the
/// operator acts on interior nodes and reports zero on the boundary.
class LinearOperator {
 public:
  const Grid& grid() const noexcept { return grid_; }
  const ScalarField& eps() const noexcept { return eps_; }
  const ScalarField& kappa_sq() const noexcept { return kappa_sq_; }
  FaceAveraging averaging() const noexcept { return averaging_; }

  /// Face coefficient eps_{i+1/2}/h^2 between node idx and idx + stride(axis).
  double face(int axis, std::size_t idx) const { return face_[axis][idx]; }
  /// Diagonal entry at an interior node.
  double diagonal(std::size_t idx) const { return diag_[idx]; }

  /// Applies the full stencil (boundary values enter as neighbours); writes
  /// zero on boundary nodes. `out` must have node_count() entries.
  void apply(std::span<const double> u, std::span<double> out) const;

 private:
  friend LinearOperator assemble_operator(const ScalarField&, const ScalarField&, FaceAveraging);

  Grid grid_;
  ScalarField eps_;
  ScalarField kappa_sq_;
  FaceAveraging averaging_ = FaceAveraging::Arithmetic;
  std::array<std::vector<double>, 3> face_;
  std::vector<double> diag_;
  std::vector<std::size_t> interior_;
};

LinearOperator assemble_operator(const ScalarField& eps, const ScalarField& kappa_sq,
                                 FaceAveraging averaging = FaceAveraging::Arithmetic);

ScalarField apply_operator(const LinearOperator& op, const ScalarField& field);

struct LinearSolveOptions {
  double tol = 1e-10;
  /// 0 means 10 x (total node count).
  std::size_t max_iter = 0;
};

struct LinearSolution {
  ScalarField u;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Solves L u = rhs at interior nodes with u = 0 on the boundary using
/// Jacobi-preconditioned conjugate gradients. Boundary entries of `rhs` are
/// ignored. Throws ConvergenceError on iteration exhaustion and
/// CoercivityError when a direction of non-positive curvature shows up.
LinearSolution solve_linear(const LinearOperator& op, const ScalarField& rhs,
                            const LinearSolveOptions& options = {});

/// Discrete harmonic extension of the boundary entries of `boundary_values`.
/// Interior entries of the argument are ignored.
ScalarField harmonic_lift(const Grid& grid, const ScalarField& boundary_values,
                          const LinearSolveOptions& options = {});

}  // namespace npbe
