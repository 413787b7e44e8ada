#pragma once

#include <optional>
#include <span>
#include <vector>

#include "npbe/elliptic.hpp"
#include "npbe/grid.hpp"

namespace npbe {

/// Which tail N(u) of kappa^2 sinh(u) is used. The linear part kappa^2 u
/// always lives in the operator L.
enum class Nonlinearity {
  Sinh,         ///< N(u) = kappa^2 (sinh u - u)
  PowerSeries,  ///< N(u) = kappa^2 sum_{odd k = 3..order} u^k / k!
};

/// -div(eps grad u) + kappa^2 sinh(u) = f in the box, u = g on its boundary.
class NpbeProblem {
 public:
  /// `g` supplies boundary values on boundary nodes; its interior entries are
  /// ignored. The harmonic lift of g is computed here.
  NpbeProblem(ScalarField eps, ScalarField kappa_sq, ScalarField f, ScalarField g,
              Nonlinearity nonlinearity = Nonlinearity::Sinh, int series_order = 7,
              FaceAveraging averaging = FaceAveraging::Arithmetic);

  const Grid& grid() const noexcept { return eps_.grid(); }
  const ScalarField& eps() const noexcept { return eps_; }
  const ScalarField& kappa_sq() const noexcept { return kappa_sq_; }
  const ScalarField& source() const noexcept { return f_; }
  const ScalarField& boundary() const noexcept { return g_; }
  const ScalarField& lift() const noexcept { return lift_; }
  const LinearOperator& op() const noexcept { return op_; }
  Nonlinearity nonlinearity() const noexcept { return nonlinearity_; }
  int series_order() const noexcept { return series_order_; }

  /// Writes N(u) nodewise into `out`.
  void tail(std::span<const double> u, std::span<double> out) const;

 private:
  ScalarField eps_, kappa_sq_, f_, g_, lift_;
  Nonlinearity nonlinearity_;
  int series_order_;
  LinearOperator op_;
};

struct PicardOptions {
  double tol = 1e-10;
  std::size_t max_iter = 200;
  /// u_k <- (1 - damping) u_{k-1} + damping A(u_{k-1}); 1 is the plain iteration.
  double damping = 1.0;
  double linear_tol = 1e-12;
  /// Abort when ||u_k|| exceeds this multiple of ||u_0||.
  double divergence_factor = 10.0;
};

struct SolveResult {
  ScalarField u;
  /// ||u_k - u_{k-1}||_L2 for k = 1, 2, ...
  std::vector<double> history;
  /// Strong-form residual ||-div(eps grad u) + kappa^2 sinh u - f||_L2 (interior).
  double residual = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Median successive ratio of `history`; empty when fewer than two steps.
  std::optional<double> rho_obs;
};

/// Fixed-point iteration u_k = A(u_{k-1}), A(v) = K(f - N(v) - L w) + w, started
/// from the linearized solution u_0 = A(0).
SolveResult picard_solve(const NpbeProblem& problem, const PicardOptions& options = {});

double residual_norm(const NpbeProblem& problem, const ScalarField& u);

/// Median of ||u_{k+1}-u_k|| / ||u_k-u_{k-1}||. Needs at least two entries.
double contraction_estimate(std::span<const double> history);

}  // namespace npbe
