#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "npbe/grid.hpp"

namespace npbe {

/// Geometric quantities of the domain entering the estimates.
struct GeometryParams {
  int dim = 3;
  double diameter = 0.0;  ///< d_Omega
  double volume = 0.0;    ///< |Omega|
  /// Side lengths, when the domain is a box. Enables the exact eigenvalue.
  std::vector<double> box_sides;
};

GeometryParams geometry_of(const Grid& grid);

struct EigenvalueBounds {
  double lower;                 ///< pi^2 / d_Omega^2 (convex domains)
  std::optional<double> exact;  ///< sum_i pi^2 / L_i^2 for boxes
  /// The exact value when known, otherwise the lower bound.
  double best() const { return exact.value_or(lower); }
};

/// Principal Dirichlet eigenvalue of -Lap: lower bound and, for boxes, exact.
EigenvalueBounds lambda1_lower(const GeometryParams& geometry);

/// Bounds on the coefficients of L = -div(eps grad .) + kappa^2.
struct CoefficientBounds {
  double theta = 1.0;         ///< ellipticity: eps >= theta
  double mu = 0.0;            ///< kappa^2 >= -mu
  double eps_w1inf = 1.0;     ///< ||eps||_{W^{1,inf}} = max(||eps||_inf, max_i ||d_i eps||_inf)
  double max_grad_eps = 0.0;  ///< max_i ||d_i eps||_inf
  double kappa_inf_sq = 0.0;  ///< ||kappa||_inf^2
  double kappa_sq_inf = 0.0;  ///< ||kappa^2||_inf
};

/// Reads the bounds off nodal coefficient fields (derivatives by centered
/// differences, one-sided at the boundary).
CoefficientBounds coefficient_bounds_of(const ScalarField& eps, const ScalarField& kappa_sq);

/// C_D <= 2 d^2 ||eps||_{W^{1,inf}} + ||kappa||_inf^2.
double c_d_upper(const CoefficientBounds& bounds, int dim);

struct SobolevBounds {
  double p;
  double d2p;     ///< D_{2,p}
  double c2p;     ///< C_{2,p}
  double dpinf;   ///< D_{p,inf} (ball majorant)
  double cpinf;   ///< C_{p,inf}
  double upper;   ///< 2^{1/p} C_{2,p} C_{p,inf}
  double lower;   ///< |Omega|^{-1/2}
};

/// Upper/lower bounds on the H^2 -> L^inf embedding constant on a convex
/// three-dimensional domain via W^{1,p}, p in (3, 6).
SobolevBounds c_s_bounds(double p, const GeometryParams& geometry);

/// Elliptic regularity constant for scalar eps by the Fourier argument.
double c_h_fourier(const CoefficientBounds& bounds, const GeometryParams& geometry);

/// Elliptic regularity constant for general eps via difference quotients;
/// needs the cutoff gradient ||grad zeta||_inf and the covering number N(Omega).
double c_h_general(const CoefficientBounds& bounds, const GeometryParams& geometry, double grad_zeta,
                   int covering_n);

/// The interior constant C_0 used by c_h_general (exposed for reporting).
double c_h_interior_constant(const CoefficientBounds& bounds, const GeometryParams& geometry,
                             double grad_zeta);

/// Critical radius M_0 and maximal admissible data size y_0*.
struct SmallDataBounds {
  double beta;     ///< C_H C_S ||kappa||^2 |Omega|^{1/2}
  double m0;       ///< C_S^{-1} acosh(1 + 1/beta)
  double y0_star;  ///< C_S^{-1}((1+beta) acosh(1+1/beta) - sqrt(1+2beta))
  bool linear_case = false;  ///< kappa == 0: both reported as +inf
};

SmallDataBounds m0_y0star(double c_h, double c_s, double kappa_inf_sq, double volume);

/// y_0 = C_H ||f||_L2 + (C_H C_D + 1) ||w||_H2.
double compute_y0(double c_h, double c_d, double f_norm, double w_norm);

/// Everything needed to evaluate the existence/uniqueness inequalities.
struct WellposednessInputs {
  double c_h = 1.0;
  double c_s = 1.0;
  double y0 = 0.0;
  double kappa_inf_sq = 0.0;
  double volume = 1.0;
};

struct WellposednessCheck {
  bool schauder_ok;       ///< y0 + C_H k^2 |O|^{1/2} (sinh(C_S M) - C_S M) <= M
  double banach_factor;   ///< C_H C_S k^2 |O|^{1/2} (cosh(C_S M) - 1)
  bool unique() const { return banach_factor < 1.0; }
};

WellposednessCheck check_wellposedness(double m, const WellposednessInputs& in);

/// The closed interval of radii M for which the existence inequality holds,
/// found by bisection either side of M_0; empty when y0 > y0*.
std::optional<std::pair<double, double>> schauder_interval(const WellposednessInputs& in,
                                                           double rel_tol = 1e-14);

/// C_H C_S ||kappa||^2 |Omega|^{1/2} (cosh(C_S M) - 1).
double contraction_bound(double m, double c_h, double c_s, double kappa_inf_sq, double volume);

/// Suprema over the complex parameter region supplied by the caller.
struct AnalyticityInputs {
  double theta = 1.0;
  double diameter = 1.0;
  double volume = 1.0;
  double c_h = 1.0;
  double c_s = 1.0;
  double c_d = 1.0;
  double sup_f_norm = 0.0;
  double sup_w_norm = 0.0;
  double sup_kappa_inf_sq = 0.0;
};

struct AnalyticityFlags {
  bool diameter_ok;  ///< d_Omega^2 < pi^2 theta C_H
  bool data_ok;      ///< y_0 < y_0*
  bool kappa_ok;     ///< ||kappa||^2 <= pi^2 theta / d_Omega^2 - 1/C_H
  bool all() const { return diameter_ok && data_ok && kappa_ok; }
};

AnalyticityFlags check_analyticity(const AnalyticityInputs& in);

/// One named quantity with a short note on how it was obtained.
struct ReportEntry {
  std::string key;
  double value;
  std::string provenance;
};

/// All constants for one problem instance.
struct ConstantsReport {
  std::vector<ReportEntry> entries;
  double value(const std::string& key) const;
  bool has(const std::string& key) const;
};

struct ConstantsRequest {
  GeometryParams geometry;
  CoefficientBounds bounds;
  double sobolev_p = 4.0;
  double grad_zeta = 1.0;
  int covering_n = 1;
  double f_norm = 0.0;  ///< ||f||_L2
  double w_norm = 0.0;  ///< ||w||_H2 of the boundary lift
  std::optional<double> radius;  ///< M for the existence/uniqueness checks
};

ConstantsReport build_constants_report(const ConstantsRequest& request);

/// `key = value` lines (17 significant digits) with provenance comments.
void write_key_value(std::ostream& os, const ConstantsReport& report);
/// CSV with header `key,value,provenance`.
void write_csv(std::ostream& os, const ConstantsReport& report);

}  // namespace npbe
