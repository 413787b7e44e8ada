#include "npbe/radial_ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "npbe/csv.hpp"
#include "npbe/error.hpp"

namespace npbe {

namespace {

constexpr double kOverflow = 50.0;

struct State {
  double y, w;
};

State rhs(const RadialParams& p, double r, State s) {
  const double k2 = p.kappa_tilde * p.kappa_tilde;
  return {s.w, -p.a * s.w / (r + p.eps_reg) - k2 * std::sinh(s.y) + p.lambda};
}

State rk4(const RadialParams& p, double r, State s, double h) {
  const State k1 = rhs(p, r, s);
  const State k2 = rhs(p, r + 0.5 * h, {s.y + 0.5 * h * k1.y, s.w + 0.5 * h * k1.w});
  const State k3 = rhs(p, r + 0.5 * h, {s.y + 0.5 * h * k2.y, s.w + 0.5 * h * k2.w});
  const State k4 = rhs(p, r + h, {s.y + h * k3.y, s.w + h * k3.w});
  return {s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          s.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

double hermite(double r0, double r1, double y0, double y1, double d0, double d1, double r) {
  const double h = r1 - r0;
  const double t = (r - r0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

}  // namespace

double hamiltonian(double y, double w, double kappa_tilde, double lambda) {
  // cosh y - 1 = 2 sinh^2(y/2) keeps small energies accurate.
  const double s = std::sinh(0.5 * y);
  return 0.5 * w * w + kappa_tilde * kappa_tilde * 2.0 * s * s - lambda * y;
}

double boundary_target(double kappa_tilde, double lambda) {
  if (!(kappa_tilde > 0.0)) throw InvalidArgument("boundary_target: kappa~ must be positive");
  return std::asinh(lambda / (kappa_tilde * kappa_tilde));
}

double OdeTrajectory::y_at(double radius) const {
  if (r.empty()) throw InvalidArgument("OdeTrajectory::y_at: empty trajectory");
  if (radius <= r.front()) return y.front();
  if (radius >= r.back()) return y.back();
  const auto it = std::upper_bound(r.begin(), r.end(), radius);
  const std::size_t k = static_cast<std::size_t>(it - r.begin()) - 1;
  return hermite(r[k], r[k + 1], y[k], y[k + 1], w[k], w[k + 1], radius);
}

OdeTrajectory integrate_regularized(const RadialParams& p) {
  if (!(p.eps_reg > 0.0)) throw InvalidArgument("integrate_regularized: eps_reg must be positive");
  if (!(p.step > 0.0)) throw InvalidArgument("integrate_regularized: step must be positive");
  if (!(p.r_max > 0.0)) throw InvalidArgument("integrate_regularized: r_max must be positive");
  if (p.a < 0.0) throw InvalidArgument("integrate_regularized: A must be non-negative");
  if (!(p.kappa_tilde > 0.0)) throw InvalidArgument("integrate_regularized: kappa~ must be positive");
  if (p.record_every == 0) throw InvalidArgument("integrate_regularized: record_every must be >= 1");

  OdeTrajectory t;
  t.params = p;
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(p.r_max / p.step - 1e-9)));
  State s{p.c, 0.0};
  const double h0 = hamiltonian(p.c, 0.0, p.kappa_tilde, p.lambda);
  double h_prev = h0;
  auto record = [&](double r) {
    t.r.push_back(r);
    t.y.push_back(s.y);
    t.w.push_back(s.w);
    t.h.push_back(h_prev);
  };
  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double r = k * p.step;
    const double h = std::min(p.step, p.r_max - r);
    const State next = rk4(p, r, s, h);
    if (!(std::abs(next.y) <= kOverflow) || !std::isfinite(next.w)) {
      t.truncated = true;
      break;
    }
    s = next;
    const double hn = hamiltonian(s.y, s.w, p.kappa_tilde, p.lambda);
    t.max_h_increase = std::max(t.max_h_increase, hn - h_prev);
    t.max_h_excess = std::max(t.max_h_excess, hn - h0);
    h_prev = hn;
    if ((k + 1) % p.record_every == 0 || k + 1 == steps) record(k + 1 == steps ? p.r_max : (k + 1) * p.step);
  }
  return t;
}

std::vector<double> default_eps_sequence() {
  std::vector<double> e;
  for (int k = 4; k <= 12; ++k) e.push_back(std::ldexp(1.0, -k));
  return e;
}

RegularizationStudy vanishing_regularization(const RadialParams& params, const std::vector<double>& eps,
                                             double delta, double tolerance) {
  if (eps.size() < 2) throw InvalidArgument("vanishing_regularization: need at least two eps values");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw InvalidArgument("vanishing_regularization: eps must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1]))
      throw InvalidArgument("vanishing_regularization: eps sequence must be strictly decreasing");
  }
  RegularizationStudy st;
  st.report.eps = eps;
  st.report.delta = delta;
  st.report.tolerance = tolerance;
  for (double e : eps) {
    RadialParams p = params;
    p.eps_reg = e;
    st.trajectories.push_back(integrate_regularized(p));
    st.report.max_h_excess = std::max(st.report.max_h_excess, st.trajectories.back().max_h_excess);
  }
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    const auto& a = st.trajectories[k];
    const auto& b = st.trajectories[k + 1];
    const std::size_t n = std::min(a.size(), b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (a.r[i] >= delta) d = std::max(d, std::abs(a.y[i] - b.y[i]));
    st.report.differences.push_back(d);
  }
  const auto& diff = st.report.differences;
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < diff.size(); ++k) {
    st.report.ratios.push_back(diff[k + 1] > 0.0 ? diff[k] / diff[k + 1] : INFINITY);
    if (!(diff[k + 1] < diff[k])) monotone = false;
  }
  st.report.cauchy = monotone && diff.back() <= tolerance;
  return st;
}

ZeroSet find_zeros(const OdeTrajectory& t, double target) {
  ZeroSet out;
  if (t.size() == 0) return out;
  out.identically_at_target = std::all_of(t.y.begin(), t.y.end(), [&](double v) { return v == target; });
  if (out.identically_at_target) return out;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double f0 = t.y[k] - target, f1 = t.y[k + 1] - target;
    if (f0 == 0.0 && k > 0) {
      const double fm = t.y[k - 1] - target;
      if (fm * f1 < 0.0) out.zeros.push_back(t.r[k]);
      continue;
    }
    if (!(f0 * f1 < 0.0)) continue;
    double lo = t.r[k], hi = t.r[k + 1];
    auto f = [&](double r) { return hermite(t.r[k], t.r[k + 1], t.y[k], t.y[k + 1], t.w[k], t.w[k + 1], r) - target; };
    const double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((f(mid) < 0.0) == (flo < 0.0))
        lo = mid;
      else
        hi = mid;
    }
    out.zeros.push_back(0.5 * (lo + hi));
  }
  return out;
}

namespace {

void check_shooting(const ShootingOptions& o) {
  if (!(o.length > 0.0)) throw InvalidArgument("shoot_scalar_npbe: interval length must be positive");
  if (o.steps < 2) throw InvalidArgument("shoot_scalar_npbe: need at least two steps");
}

// Integrates u'' = k sinh u on (0, L); returns the profile at the step nodes.
std::vector<double> shoot_profile(double coeff, double slope, const ShootingOptions& o, bool* blew_up) {
  const double h = o.length / o.steps;
  std::vector<double> u(o.steps + 1);
  double y = 0.0, w = slope;
  u[0] = y;
  auto f = [&](double yy) { return coeff * std::sinh(yy); };
  for (int k = 0; k < o.steps; ++k) {
    const double k1y = w, k1w = f(y);
    const double k2y = w + 0.5 * h * k1w, k2w = f(y + 0.5 * h * k1y);
    const double k3y = w + 0.5 * h * k2w, k3w = f(y + 0.5 * h * k2y);
    const double k4y = w + h * k3w, k4w = f(y + h * k3y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    if (!(std::abs(y) <= kOverflow)) {
      if (blew_up) *blew_up = true;
      std::fill(u.begin() + k + 1, u.end(), std::copysign(kOverflow, y));
      return u;
    }
    u[k + 1] = y;
  }
  if (blew_up) *blew_up = false;
  return u;
}

double lambda1_of(const ShootingOptions& o) {
  const double q = std::numbers::pi / o.length;
  return q * q;
}

ShootingSolution make_solution(double eta, double slope, const ShootingOptions& o) {
  ShootingSolution s;
  s.eta = eta;
  s.slope = slope;
  s.u = shoot_profile(eta - lambda1_of(o), slope, o, nullptr);
  const double h = o.length / o.steps;
  s.x.resize(s.u.size());
  double sup = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    s.x[i] = i * h;
    sup = std::max(sup, std::abs(s.u[i]));
    const double wt = (i == 0 || i + 1 == s.u.size()) ? 0.5 * h : h;
    l2 += wt * s.u[i] * s.u[i];
  }
  s.sup_norm = sup;
  s.l2_norm = std::sqrt(l2);
  s.endpoint_residual = std::abs(s.u.back());
  return s;
}

}  // namespace

double shooting_endpoint(double eta, double slope, const ShootingOptions& o) {
  check_shooting(o);
  return shoot_profile(eta - lambda1_of(o), slope, o, nullptr).back();
}

ShootingSolution shoot_bracket(double eta, double s_lo, double s_hi, const ShootingOptions& o) {
  check_shooting(o);
  double flo = shooting_endpoint(eta, s_lo, o);
  const double fhi = shooting_endpoint(eta, s_hi, o);
  if (flo == 0.0) return make_solution(eta, s_lo, o);
  if (fhi == 0.0) return make_solution(eta, s_hi, o);
  if (!(flo * fhi < 0.0))
    throw InvalidArgument("shoot_bracket: u(L) has the same sign at both ends of the slope bracket");
  for (int it = 0; it < 200 && s_hi - s_lo > 1e-15 * std::max(1.0, std::abs(s_hi)); ++it) {
    const double mid = 0.5 * (s_lo + s_hi);
    const double fm = shooting_endpoint(eta, mid, o);
    if (fm == 0.0) return make_solution(eta, mid, o);
    if ((fm < 0.0) == (flo < 0.0)) {
      s_lo = mid;
      flo = fm;
    } else {
      s_hi = mid;
    }
  }
  return make_solution(eta, 0.5 * (s_lo + s_hi), o);
}

std::optional<ShootingSolution> shoot_scalar_npbe(double eta, const ShootingOptions& o) {
  check_shooting(o);
  if (!(o.slope_lo > 0.0 && o.slope_hi > o.slope_lo))
    throw InvalidArgument("shoot_scalar_npbe: need 0 < slope_lo < slope_hi");
  if (o.scan_points < 2) throw InvalidArgument("shoot_scalar_npbe: need at least two scan points");
  const double ratio = std::log(o.slope_hi / o.slope_lo);
  double s_prev = o.slope_lo;
  double f_prev = shooting_endpoint(eta, s_prev, o);
  for (int k = 1; k < o.scan_points; ++k) {
    const double s = o.slope_lo * std::exp(ratio * k / (o.scan_points - 1));
    const double f = shooting_endpoint(eta, s, o);
    if (f_prev * f <= 0.0) {
      auto sol = shoot_bracket(eta, s_prev, s, o);
      if (std::abs(sol.slope) > o.s_min) return sol;
    }
    s_prev = s;
    f_prev = f;
  }
  return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const OdeTrajectory& t) {
  os << "r,y,w,H\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << format_number(t.r[i]) << ',' << format_number(t.y[i]) << ',' << format_number(t.w[i]) << ','
       << format_number(t.h[i]) << '\n';
}

void write_zeros_csv(std::ostream& os, const ZeroSet& z) {
  os << "n,R\n";
  for (std::size_t i = 0; i < z.zeros.size(); ++i) os << i + 1 << ',' << format_number(z.zeros[i]) << '\n';
}

void write_phase_portrait_csv(std::ostream& os, double kappa_tilde, double lambda, double y_lo, double y_hi,
                              double w_lo, double w_hi, int n) {
  if (n < 2) throw InvalidArgument("write_phase_portrait_csv: need n >= 2");
  os << "y,w,dy,dw,H\n";
  const double k2 = kappa_tilde * kappa_tilde;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double y = y_lo + (y_hi - y_lo) * i / (n - 1);
      const double w = w_lo + (w_hi - w_lo) * j / (n - 1);
      os << format_number(y) << ',' << format_number(w) << ',' << format_number(w) << ','
         << format_number(-k2 * std::sinh(y) + lambda) << ',' << format_number(hamiltonian(y, w, kappa_tilde, lambda))
         << '\n';
    }
}

}  // namespace npbe
