#include "npbe/constants.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

#include "npbe/error.hpp"

namespace npbe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// acosh(1 + t) = ln(x + sqrt(x^2 - 1)) with x^2 - 1 = t (2 + t) kept exact.
double acosh1p(double t) {
  if (t < 0.0) throw InvalidArgument("acosh argument below 1");
  return std::log1p(t + std::sqrt(t * (2.0 + t)));
}

// cosh(x) - 1 without cancellation.
double coshm1(double x) {
  const double s = std::sinh(0.5 * x);
  return 2.0 * s * s;
}

// sinh(x) - x without cancellation for small |x|.
double sinh_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    double term = x * x2 / 6.0, sum = 0.0;
    for (int k = 3; k < 25; k += 2) {
      sum += term;
      term *= x2 / ((k + 1.0) * (k + 2.0));
    }
    return sum;
  }
  return std::sinh(x) - x;
}

double coercivity_gap(const CoefficientBounds& b, double lambda1) {
  const double gap = b.theta * lambda1 - b.mu;
  if (!(gap > 0.0))
    throw CoercivityError("coercivity condition theta*lambda1 > mu fails (theta*lambda1 - mu = " +
                          std::to_string(gap) + ")");
  return gap;
}

}  // namespace

GeometryParams geometry_of(const Grid& grid) {
  GeometryParams g;
  g.dim = grid.dim();
  g.diameter = grid.diameter();
  g.volume = grid.volume();
  for (int a = 0; a < grid.dim(); ++a) g.box_sides.push_back(grid.extent(a));
  return g;
}

EigenvalueBounds lambda1_lower(const GeometryParams& geometry) {
  if (!(geometry.diameter > 0.0)) throw InvalidArgument("lambda1_lower: diameter must be positive");
  EigenvalueBounds e{kPi * kPi / (geometry.diameter * geometry.diameter), std::nullopt};
  if (!geometry.box_sides.empty()) {
    double s = 0.0;
    for (double l : geometry.box_sides) s += kPi * kPi / (l * l);
    e.exact = s;
  }
  return e;
}

CoefficientBounds coefficient_bounds_of(const ScalarField& eps, const ScalarField& kappa_sq) {
  require_same_grid(eps, kappa_sq, "coefficient_bounds_of");
  const Grid& g = eps.grid();
  CoefficientBounds b;
  b.theta = eps.min();
  b.mu = std::max(0.0, -kappa_sq.min());
  double kmax = 0.0;
  for (double k : kappa_sq.values()) kmax = std::max(kmax, std::abs(k));
  b.kappa_inf_sq = kmax;
  b.kappa_sq_inf = kmax;

  double grad = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const auto s = g.stride(a);
    const double h = g.spacing(a);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
      const int i = g.multi_index(idx)[a];
      double d;
      if (i == 0)
        d = (eps[idx + s] - eps[idx]) / h;
      else if (i == g.nodes(a) - 1)
        d = (eps[idx] - eps[idx - s]) / h;
      else
        d = (eps[idx + s] - eps[idx - s]) / (2.0 * h);
      grad = std::max(grad, std::abs(d));
    }
  }
  double emax = 0.0;
  for (double e : eps.values()) emax = std::max(emax, std::abs(e));
  b.max_grad_eps = grad;
  b.eps_w1inf = std::max(emax, grad);
  return b;
}

double c_d_upper(const CoefficientBounds& bounds, int dim) {
  return 2.0 * dim * dim * bounds.eps_w1inf + bounds.kappa_inf_sq;
}

SobolevBounds c_s_bounds(double p, const GeometryParams& geometry) {
  if (!(p > 3.0 && p < 6.0)) throw InvalidArgument("c_s_bounds: p must lie in (3, 6)");
  const double d = geometry.diameter, vol = geometry.volume;
  if (!(d > 0.0 && vol > 0.0)) throw InvalidArgument("c_s_bounds: diameter and volume must be positive");

  SobolevBounds s{};
  s.p = p;
  const double a = 3.0 * (p + 2.0);
  s.d2p = std::pow(d, 1.0 + a / (2.0 * p)) * std::pow(kPi, a / (4.0 * p)) / (3.0 * vol) *
          std::tgamma(3.0 * (p - 2.0) / (4.0 * p)) / std::tgamma(a / (4.0 * p)) *
          std::sqrt(std::tgamma(3.0 / p) / std::tgamma(3.0 * (p - 1.0) / p)) *
          std::pow(4.0 / std::sqrt(kPi), (p - 2.0) / (2.0 * p));
  s.c2p = std::sqrt(2.0) * std::max(std::pow(vol, 1.0 / p - 0.5), s.d2p);

  // || |x|^{-2} ||_{L^{p'}} over the ball of radius d_Omega, which contains V.
  const double pc = p / (p - 1.0);
  const double radial = 3.0 - 2.0 * pc;
  if (!(radial > 0.0)) throw InvalidArgument("c_s_bounds: radial majorant integral diverges");
  const double kernel = std::pow(4.0 * kPi / radial * std::pow(d, radial), 1.0 / pc);
  s.dpinf = d * d * d / (3.0 * vol) * kernel;
  s.cpinf = std::pow(2.0, 1.0 - 1.0 / p) * std::max(std::pow(vol, -1.0 / p), s.dpinf);

  s.upper = std::pow(2.0, 1.0 / p) * s.c2p * s.cpinf;
  s.lower = 1.0 / std::sqrt(vol);
  return s;
}

double c_h_fourier(const CoefficientBounds& b, const GeometryParams& geometry) {
  const double lam = lambda1_lower(geometry).best();
  const double gap = coercivity_gap(b, lam);
  const double bracket = std::pow(1.0 + std::pow(lam, 2.0 / 3.0), 1.5);  // <lam^{1/3}>^3
  const double base = bracket / (lam * b.theta);
  return base * (1.0 + (b.kappa_sq_inf + std::sqrt(static_cast<double>(geometry.dim)) * b.max_grad_eps *
                                             std::sqrt(lam)) / gap);
}

double c_h_interior_constant(const CoefficientBounds& b, const GeometryParams& geometry, double grad_zeta) {
  if (!(grad_zeta > 0.0)) throw InvalidArgument("c_h_general: ||grad zeta|| must be positive");
  const double lam = lambda1_lower(geometry).best();
  const double gap = coercivity_gap(b, lam);
  const double c1 = b.eps_w1inf * (grad_zeta + 0.5);
  const double delta = b.theta / (2.0 * c1);
  const double c2 = b.eps_w1inf * (2.0 * grad_zeta + (1.0 + 2.0 * grad_zeta) / (2.0 * delta));
  const double ratio = 1.0 + b.kappa_sq_inf / gap;
  return 4.0 / b.theta *
         (2.0 / b.theta * ratio * ratio + lam * (c2 + b.theta * grad_zeta * grad_zeta) / (gap * gap));
}

double c_h_general(const CoefficientBounds& b, const GeometryParams& geometry, double grad_zeta,
                   int covering_n) {
  if (covering_n < 1) throw InvalidArgument("c_h_general: covering number must be a positive integer");
  const double lam = lambda1_lower(geometry).best();
  const double gap = coercivity_gap(b, lam);
  const double c0 = c_h_interior_constant(b, geometry, grad_zeta);
  const double h1 = (1.0 + lam) / gap;
  return covering_n * std::sqrt(h1 * h1 + geometry.dim * c0);
}

SmallDataBounds m0_y0star(double c_h, double c_s, double kappa_inf_sq, double volume) {
  if (!(c_h > 0.0 && c_s > 0.0 && volume > 0.0))
    throw InvalidArgument("m0_y0star: C_H, C_S and |Omega| must be positive");
  if (kappa_inf_sq == 0.0) return {0.0, kInf, kInf, true};
  const double beta = c_h * c_s * kappa_inf_sq * std::sqrt(volume);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("m0_y0star: beta must be positive and finite");
  const double ac = acosh1p(1.0 / beta);
  SmallDataBounds r;
  r.beta = beta;
  r.m0 = ac / c_s;
  r.y0_star = ((1.0 + beta) * ac - std::sqrt(1.0 + 2.0 * beta)) / c_s;
  return r;
}

double compute_y0(double c_h, double c_d, double f_norm, double w_norm) {
  if (f_norm < 0.0 || w_norm < 0.0) throw InvalidArgument("compute_y0: norms must be non-negative");
  return c_h * f_norm + (c_h * c_d + 1.0) * w_norm;
}

double contraction_bound(double m, double c_h, double c_s, double kappa_inf_sq, double volume) {
  if (m < 0.0) throw InvalidArgument("contraction_bound: radius must be non-negative");
  return c_h * c_s * kappa_inf_sq * std::sqrt(volume) * coshm1(c_s * m);
}

WellposednessCheck check_wellposedness(double m, const WellposednessInputs& in) {
  if (!(m > 0.0)) throw InvalidArgument("check_wellposedness: radius M must be positive");
  const double scale = in.c_h * in.kappa_inf_sq * std::sqrt(in.volume);
  const double lhs = in.y0 + scale * sinh_minus_x(in.c_s * m);
  return {lhs <= m, contraction_bound(m, in.c_h, in.c_s, in.kappa_inf_sq, in.volume)};
}

std::optional<std::pair<double, double>> schauder_interval(const WellposednessInputs& in, double rel_tol) {
  const auto sd = m0_y0star(in.c_h, in.c_s, in.kappa_inf_sq, in.volume);
  const double scale = in.c_h * in.kappa_inf_sq * std::sqrt(in.volume);
  auto excess = [&](double m) { return in.y0 + scale * sinh_minus_x(in.c_s * m) - m; };

  if (sd.linear_case) {
    // F(M) = y0 - M: every M >= y0 works.
    if (in.y0 <= 0.0) return std::pair{0.0, kInf};
    return std::pair{in.y0, kInf};
  }
  // F is convex with its minimum at M_0.
  if (excess(sd.m0) > 0.0) return std::nullopt;
  auto bisect = [&](double good, double bad) {
    while (std::abs(bad - good) > rel_tol * std::max(1.0, std::abs(good))) {
      const double mid = 0.5 * (good + bad);
      if (mid == good || mid == bad) break;
      (excess(mid) <= 0.0 ? good : bad) = mid;
    }
    return good;
  };
  const double lo = in.y0 > 0.0 ? bisect(sd.m0, 0.0) : 0.0;
  double far = 2.0 * sd.m0;
  while (excess(far) <= 0.0) far *= 2.0;
  const double hi = bisect(sd.m0, far);
  return std::pair{lo, hi};
}

AnalyticityFlags check_analyticity(const AnalyticityInputs& in) {
  AnalyticityFlags f{};
  const double d2 = in.diameter * in.diameter;
  f.diameter_ok = d2 > 0.0 && d2 < kPi * kPi * in.theta * in.c_h;
  const double y0 = compute_y0(in.c_h, in.c_d, in.sup_f_norm, in.sup_w_norm);
  const auto sd = m0_y0star(in.c_h, in.c_s, in.sup_kappa_inf_sq, in.volume);
  f.data_ok = y0 < sd.y0_star;
  f.kappa_ok = in.sup_kappa_inf_sq <= kPi * kPi * in.theta / d2 - 1.0 / in.c_h;
  return f;
}

double ConstantsReport::value(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return e.value;
  throw InvalidArgument("ConstantsReport: no entry named '" + key + "'");
}

bool ConstantsReport::has(const std::string& key) const {
  return std::any_of(entries.begin(), entries.end(), [&](const ReportEntry& e) { return e.key == key; });
}

ConstantsReport build_constants_report(const ConstantsRequest& rq) {
  ConstantsReport r;
  auto add = [&](std::string key, double v, std::string why) { r.entries.push_back({std::move(key), v, std::move(why)}); };
  const auto& geo = rq.geometry;
  const auto& b = rq.bounds;

  add("dim", geo.dim, "input");
  add("diameter", geo.diameter, "box diagonal");
  add("volume", geo.volume, "box volume");
  const auto eig = lambda1_lower(geo);
  add("lambda1_lower", eig.lower, "pi^2/d^2 (convex domain)");
  if (eig.exact) add("lambda1_exact", *eig.exact, "sum_i pi^2/L_i^2 (box)");
  add("theta", b.theta, "min eps");
  add("mu", b.mu, "max(0, -min kappa^2)");
  add("eps_w1inf", b.eps_w1inf, "max(||eps||_inf, max_i ||d_i eps||_inf)");
  add("kappa_inf_sq", b.kappa_inf_sq, "||kappa||_inf^2");

  const double c_d = c_d_upper(b, geo.dim);
  add("C_D", c_d, "2 d^2 ||eps||_W1inf + ||kappa||_inf^2");

  const auto sob = c_s_bounds(rq.sobolev_p, geo);
  add("sobolev_p", sob.p, "input");
  add("D_2p", sob.d2p, "Poincare-Sobolev constant, convex domain, Gamma-function formula");
  add("C_2p", sob.c2p, "sqrt(2) max(|O|^{1/p-1/2}, D_2p)");
  add("D_pinf", sob.dpinf, "d^3/(3|O|) || |x|^-2 ||_{L^p'(B(0,d))}");
  add("C_pinf", sob.cpinf, "2^{1-1/p} max(|O|^{-1/p}, D_pinf)");
  add("C_S_lower", sob.lower, "|O|^{-1/2} (constant functions)");
  add("C_S_upper", sob.upper, "2^{1/p} C_2p C_pinf");

  const double ch_f = c_h_fourier(b, geo);
  add("C_H_fourier", ch_f, "Fourier estimate, scalar eps");
  add("C_0", c_h_interior_constant(b, geo, rq.grad_zeta), "difference-quotient interior constant");
  add("grad_zeta", rq.grad_zeta, "input");
  add("covering_n", rq.covering_n, "input");
  add("C_H_general", c_h_general(b, geo, rq.grad_zeta, rq.covering_n), "N(O) sqrt(((1+l1)/(theta l1-mu))^2 + d C_0)");
  const double c_h = ch_f;
  const double c_s = sob.upper;
  add("C_H", c_h, "C_H_fourier");
  add("C_S", c_s, "C_S_upper");

  const auto sd = m0_y0star(c_h, c_s, b.kappa_inf_sq, geo.volume);
  add("linear_case", sd.linear_case ? 1.0 : 0.0, "kappa == 0");
  add("beta", sd.beta, "C_H C_S ||kappa||^2 |O|^{1/2}");
  add("M0", sd.m0, "C_S^{-1} acosh(1 + 1/beta)");
  add("y0_star", sd.y0_star, "C_S^{-1}((1+beta) acosh(1+1/beta) - sqrt(1+2 beta))");

  add("f_norm", rq.f_norm, "||f||_L2 (discrete)");
  add("w_norm", rq.w_norm, "||w||_H2 (discrete)");
  const double y0 = compute_y0(c_h, c_d, rq.f_norm, rq.w_norm);
  add("y0", y0, "C_H ||f|| + (C_H C_D + 1) ||w||");

  const WellposednessInputs in{c_h, c_s, y0, b.kappa_inf_sq, geo.volume};
  const auto interval = schauder_interval(in);
  add("existence_possible", interval ? 1.0 : 0.0, "y0 <= y0_star");
  if (interval) {
    add("M_min", interval->first, "smallest M with the existence inequality (bisection)");
    add("M_max", interval->second, "largest M with the existence inequality (bisection)");
  }
  std::optional<double> m = rq.radius;
  if (!m && interval && interval->first > 0.0) m = interval->first;
  if (m) {
    const auto chk = check_wellposedness(*m, in);
    add("M", *m, rq.radius ? "input" : "M_min");
    add("schauder_ok", chk.schauder_ok ? 1.0 : 0.0, "existence inequality at M");
    add("banach_factor", chk.banach_factor, "C_H C_S ||kappa||^2 |O|^{1/2}(cosh(C_S M) - 1)");
    add("unique", chk.unique() ? 1.0 : 0.0, "banach_factor < 1");
  }

  const auto flags = check_analyticity({b.theta, geo.diameter, geo.volume, c_h, c_s, c_d, rq.f_norm, rq.w_norm,
                                        b.kappa_inf_sq});
  add("analytic_diameter_ok", flags.diameter_ok, "d^2 < pi^2 theta C_H");
  add("analytic_data_ok", flags.data_ok, "y0 < y0_star");
  add("analytic_kappa_ok", flags.kappa_ok, "||kappa||^2 <= pi^2 theta/d^2 - 1/C_H");
  add("analytic", flags.all(), "all three conditions");
  return r;
}

void write_key_value(std::ostream& os, const ConstantsReport& report) {
  const auto old = os.precision(17);
  for (const auto& e : report.entries) os << e.key << " = " << e.value << '\n';
  os.precision(old);
}

void write_csv(std::ostream& os, const ConstantsReport& report) {
  const auto old = os.precision(17);
  os << "key,value,provenance\n";
  for (const auto& e : report.entries) os << e.key << ',' << e.value << ",\"" << e.provenance << "\"\n";
  os.precision(old);
}

}  // namespace npbe
