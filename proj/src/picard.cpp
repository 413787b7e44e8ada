#include "npbe/picard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npbe/error.hpp"

namespace npbe {

NpbeProblem::NpbeProblem(ScalarField eps, ScalarField kappa_sq, ScalarField f, ScalarField g,
                         Nonlinearity nonlinearity, int series_order, FaceAveraging averaging)
    : eps_(std::move(eps)),
      kappa_sq_(std::move(kappa_sq)),
      f_(std::move(f)),
      g_(std::move(g)),
      nonlinearity_(nonlinearity),
      series_order_(series_order) {
  require_same_grid(eps_, kappa_sq_, "NpbeProblem");
  require_same_grid(eps_, f_, "NpbeProblem");
  require_same_grid(eps_, g_, "NpbeProblem");
  if (nonlinearity_ == Nonlinearity::PowerSeries && (series_order_ < 3 || series_order_ % 2 == 0))
    throw InvalidArgument("NpbeProblem: power-series order must be odd and >= 3");
  for (double k : kappa_sq_.values())
    if (k < 0.0) throw InvalidArgument("NpbeProblem: kappa^2 must be non-negative for real runs");
  op_ = assemble_operator(eps_, kappa_sq_, averaging);
  lift_ = harmonic_lift(grid(), g_, {.tol = 1e-13});
}

void NpbeProblem::tail(std::span<const double> u, std::span<double> out) const {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double k2 = kappa_sq_[i];
    if (k2 == 0.0) {
      out[i] = 0.0;
      continue;
    }
    const double x = u[i];
    if (nonlinearity_ == Nonlinearity::Sinh) {
      out[i] = k2 * (std::sinh(x) - x);
    } else {
      // x^3/3! + x^5/5! + ... up to x^order/order!
      double term = x * x * x / 6.0, sum = 0.0;
      for (int k = 3; k <= series_order_; k += 2) {
        sum += term;
        term *= x * x / ((k + 1.0) * (k + 2.0));
      }
      out[i] = k2 * sum;
    }
  }
}

namespace {

double l2_norm(const Grid& g, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += trapezoid_weight(g, i) * v[i] * v[i];
  return std::sqrt(s);
}

}  // namespace

SolveResult picard_solve(const NpbeProblem& problem, const PicardOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("picard_solve: tolerance must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw InvalidArgument("picard_solve: damping must lie in (0, 1]");

  const Grid& g = problem.grid();
  const std::size_t n = g.node_count();
  const LinearSolveOptions lin{.tol = options.linear_tol, .max_iter = 0};

  // u_0 = A(0) = K(f - L w) + w, the linearized solution.
  ScalarField rhs = apply_operator(problem.op(), problem.lift());
  for (std::size_t i = 0; i < n; ++i) rhs[i] = problem.source()[i] - rhs[i];
  ScalarField image = solve_linear(problem.op(), rhs, lin).u;
  for (std::size_t i = 0; i < n; ++i) image[i] += problem.lift()[i];

  SolveResult result;
  result.u = image;
  const double u0_norm = l2_norm(g, image.values());

  // A is affine in N(v), so A(u_k) = A(u_{k-1}) + K(N(u_{k-1}) - N(u_k)).
  // Tracking the image incrementally keeps the step norms free of
  // linear-solver noise at the level of ||u||.
  std::vector<double> tail_prev(n, 0.0), tail_cur(n, 0.0);
  ScalarField delta_rhs(g);
  for (std::size_t k = 1; k <= options.max_iter; ++k) {
    problem.tail(result.u.values(), tail_cur);
    for (std::size_t i = 0; i < n; ++i) delta_rhs[i] = tail_prev[i] - tail_cur[i];
    const auto correction = solve_linear(problem.op(), delta_rhs, lin).u;
    for (std::size_t i = 0; i < n; ++i) image[i] += correction[i];
    std::swap(tail_prev, tail_cur);

    double step_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = (1.0 - options.damping) * result.u[i] + options.damping * image[i];
      const double d = next - result.u[i];
      step_sq += trapezoid_weight(g, i) * d * d;
      result.u[i] = next;
    }
    const double step = std::sqrt(step_sq);
    result.history.push_back(step);
    result.iterations = k;

    const double u_norm = l2_norm(g, result.u.values());
    if (!std::isfinite(u_norm) || (u0_norm > 0.0 && u_norm > options.divergence_factor * u0_norm)) {
      throw DivergenceError("picard_solve: iterate norm grew from " + std::to_string(u0_norm) + " to " +
                            std::to_string(u_norm) + " after " + std::to_string(k) +
                            " iterations; the contraction (uniqueness) smallness condition fails");
    }
    if (step <= options.tol * std::max(1.0, u_norm)) {
      result.converged = true;
      break;
    }
  }

  if (result.history.size() >= 2) result.rho_obs = contraction_estimate(result.history);
  result.residual = residual_norm(problem, result.u);
  return result;
}

double residual_norm(const NpbeProblem& problem, const ScalarField& u) {
  if (!(u.grid() == problem.grid())) throw GridMismatch("residual_norm: field grid differs from problem grid");
  const Grid& g = problem.grid();
  const std::size_t n = g.node_count();
  ScalarField r = apply_operator(problem.op(), u);
  std::vector<double> tail(n);
  problem.tail(u.values(), tail);
  for (std::size_t i = 0; i < n; ++i) r[i] = g.is_boundary(i) ? 0.0 : r[i] + tail[i] - problem.source()[i];
  return l2_norm(g, r.values());
}

double contraction_estimate(std::span<const double> history) {
  if (history.size() < 2)
    throw InvalidArgument("contraction_estimate: need at least three iterates (two step norms)");
  std::vector<double> ratios;
  for (std::size_t k = 1; k < history.size(); ++k) {
    if (history[k - 1] == 0.0) break;
    ratios.push_back(history[k] / history[k - 1]);
  }
  if (ratios.empty()) return 0.0;
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  return m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

}  // namespace npbe
