#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

namespace npbe {

/// r y'' + A y' + kappa~^2 r sinh y = r lambda, regularized by r -> r + eps_reg,
/// with y(0) = c, y'(0) = 0.
struct RadialParams {
  double a = 2.0;             ///< A = d - 1
  double kappa_tilde = 1.0;
  double lambda = 0.0;
  double c = 1.0;
  double eps_reg = 1.0 / 4096.0;
  double step = 1e-3;
  double r_max = 20.0;
  /// Keep every k-th step in the trajectory (all steps are still checked).
  std::size_t record_every = 1;
};

/// H(y, w) = w^2/2 + kappa~^2 (cosh y - 1) - lambda y.
double hamiltonian(double y, double w, double kappa_tilde, double lambda);

/// Minimizer asinh(lambda / kappa~^2) of H(., 0); also the constant solution.
double boundary_target(double kappa_tilde, double lambda);

struct OdeTrajectory {
  RadialParams params;
  std::vector<double> r, y, w, h;
  /// Set when |y| passed the overflow guard; sampling stops there.
  bool truncated = false;
  /// Largest single-step increase of H over all steps (not only recorded ones).
  double max_h_increase = 0.0;
  /// Largest H along the path minus H(c, 0).
  double max_h_excess = 0.0;

  std::size_t size() const noexcept { return r.size(); }
  /// Cubic Hermite interpolant of y between recorded samples.
  double y_at(double radius) const;
};

/// Classical fourth-order Runge-Kutta with fixed step on [0, r_max].
OdeTrajectory integrate_regularized(const RadialParams& params);

struct CauchyReport {
  std::vector<double> eps;
  /// sup |y_{eps_k} - y_{eps_{k+1}}| on [delta, r_max].
  std::vector<double> differences;
  /// differences[k] / differences[k+1].
  std::vector<double> ratios;
  double delta = 0.1;
  double tolerance = 1e-6;
  /// Differences decrease monotonically and the last is below the tolerance.
  bool cauchy = false;
  /// max over eps of (max_r H - H(c, 0)).
  double max_h_excess = 0.0;
};

struct RegularizationStudy {
  std::vector<OdeTrajectory> trajectories;
  CauchyReport report;
  const OdeTrajectory& limit() const { return trajectories.back(); }
};

/// The eps values 2^-4, ..., 2^-12.
std::vector<double> default_eps_sequence();

/// Integrates once per eps (strictly decreasing) and compares consecutive runs.
RegularizationStudy vanishing_regularization(const RadialParams& params, const std::vector<double>& eps_sequence,
                                             double delta = 0.1, double tolerance = 1e-6);

struct ZeroSet {
  std::vector<double> zeros;
  /// The whole trajectory sits on the target, so no strict sign change exists.
  bool identically_at_target = false;
};

/// Crossings of y(r) = target, bracketed by sign changes and refined by
/// bisection on the Hermite interpolant.
ZeroSet find_zeros(const OdeTrajectory& trajectory, double target = 0.0);

struct ShootingOptions {
  double length = 3.14159265358979323846;  ///< interval (0, L); lambda_1 = (pi / L)^2
  double slope_lo = 1e-4;
  double slope_hi = 5.0;
  int scan_points = 400;
  int steps = 4000;
  double s_min = 1e-6;
};

struct ShootingSolution {
  double eta;
  double slope;  ///< u'(0); -u (slope -s) solves the same problem
  std::vector<double> x, u;
  double sup_norm;
  double l2_norm;
  double endpoint_residual;  ///< |u(L)|
};

/// u(L) for u'' = (eta - lambda_1) sinh u, u(0) = 0, u'(0) = s.
double shooting_endpoint(double eta, double slope, const ShootingOptions& options = {});

/// Bisects on [s_lo, s_hi]; throws InvalidArgument unless the bracket straddles a root.
ShootingSolution shoot_bracket(double eta, double s_lo, double s_hi, const ShootingOptions& options = {});

/// Scans slopes for the first sign change of u(L) with |s| > s_min and refines
/// it; empty when the scan finds none.
std::optional<ShootingSolution> shoot_scalar_npbe(double eta, const ShootingOptions& options = {});

void write_trajectory_csv(std::ostream& os, const OdeTrajectory& trajectory);
void write_zeros_csv(std::ostream& os, const ZeroSet& zeros);
/// Samples (y, w) -> (w, -kappa~^2 sinh y + lambda) on a rectangle.
void write_phase_portrait_csv(std::ostream& os, double kappa_tilde, double lambda, double y_lo, double y_hi,
                              double w_lo, double w_hi, int n);

}  // namespace npbe
