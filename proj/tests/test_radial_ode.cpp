#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "npbe/error.hpp"
#include "npbe/radial_ode.hpp"
#include "oracles.hpp"

using namespace npbe;
using oracle::pi;

namespace {

RadialParams bessel(double c, double a = 2.0) {
  RadialParams p;
  p.a = a;
  p.c = c;
  return p;
}

// Half period of u'' = -k sinh u at amplitude amp, from the energy integral
// with u = amp sin(theta) removing the endpoint singularity.
double half_period(double k, double amp) {
  const int n = 20000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = (i + 0.5) * (pi / 2.0) / n;
    const double gap = std::cosh(amp) - std::cosh(amp * std::sin(th));
    s += amp * std::cos(th) / std::sqrt(2.0 * k * gap);
  }
  return 2.0 * s * (pi / 2.0) / n;
}

// Amplitude with half period pi, by bisection on the quadrature above.
double amplitude_oracle(double k) {
  double lo = 1e-6, hi = 20.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (half_period(k, mid) > pi ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("hamiltonian examples") {
  CHECK(hamiltonian(0.0, 0.0, 1.3, 0.7) == 0.0);
  CHECK(hamiltonian(1.0, 0.0, 1.0, 0.0) == doctest::Approx(0.54308).epsilon(1e-5));
  CHECK(hamiltonian(1.0, 0.0, 1.0, 0.0) == doctest::Approx(std::cosh(1.0) - 1.0).epsilon(1e-15));
  CHECK(hamiltonian(0.5, 2.0, 2.0, 1.0) == doctest::Approx(2.0 + 4.0 * (std::cosh(0.5) - 1.0) - 0.5));
  for (double lambda : {0.0, 0.3, 2.0}) {
    const double p = boundary_target(1.5, lambda);
    const double hp = hamiltonian(p, 0.0, 1.5, lambda);
    CHECK(hp <= 0.0);
    if (lambda == 0.0) CHECK(hp == 0.0);
    if (lambda > 0.0) CHECK(hp < 0.0);
    for (double d : {-0.1, -1e-3, 1e-3, 0.1}) CHECK(hamiltonian(p + d, 0.0, 1.5, lambda) > hp);
  }
  CHECK_THROWS_AS(boundary_target(0.0, 1.0), InvalidArgument);
}

TEST_CASE("integrate_regularized: fixed point stays put") {
  RadialParams p = bessel(0.0);
  p.lambda = 0.8;
  p.kappa_tilde = 1.2;
  p.c = boundary_target(1.2, 0.8);
  const auto t = integrate_regularized(p);
  for (double v : t.y) CHECK(v == doctest::Approx(p.c).epsilon(1e-12));
  CHECK_FALSE(t.truncated);
}

TEST_CASE("integrate_regularized: H is conserved without damping") {
  const auto t = integrate_regularized(bessel(1.0, 0.0));
  const double h0 = hamiltonian(1.0, 0.0, 1.0, 0.0);
  double drift = 0.0;
  for (double h : t.h) drift = std::max(drift, std::abs(h - h0));
  CHECK(drift <= 1e-8);
  CHECK(t.r.back() == 20.0);
}

TEST_CASE("property: H is non-increasing with damping and the orbit stays confined") {
  for (double c : {0.5, 1.0, 2.0, -1.5}) {
    auto p = bessel(c);
    p.lambda = c > 0 ? 0.0 : 0.4;
    const auto t = integrate_regularized(p);
    CHECK(t.max_h_increase <= 1e-10);
    CHECK(t.max_h_excess <= 1e-10);
    for (std::size_t k = 1; k < t.size(); ++k) CHECK(t.h[k] <= t.h[k - 1] + 1e-10);
  }
}

TEST_CASE("property: odd symmetry in the initial value") {
  const auto a = integrate_regularized(bessel(1.3)), b = integrate_regularized(bessel(-1.3));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.y[k] == -b.y[k]);
}

TEST_CASE("property: fourth-order convergence in the step") {
  auto run = [](double step) {
    auto p = bessel(1.0);
    p.eps_reg = 0.25;
    p.r_max = 5.0;
    p.step = step;
    return integrate_regularized(p).y.back();
  };
  const double ref = run(0.05 / 16.0);
  const double e1 = std::abs(run(0.1) - ref), e2 = std::abs(run(0.05) - ref);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("integrate_regularized: errors and truncation") {
  auto p = bessel(1.0);
  p.eps_reg = 0.0;
  CHECK_THROWS_AS(integrate_regularized(p), InvalidArgument);
  p = bessel(1.0);
  p.step = 0.0;
  CHECK_THROWS_AS(integrate_regularized(p), InvalidArgument);
  p = bessel(1.0);
  p.a = -1.0;
  CHECK_THROWS_AS(integrate_regularized(p), InvalidArgument);
  p = bessel(1.0);
  p.record_every = 0;
  CHECK_THROWS_AS(integrate_regularized(p), InvalidArgument);
  // A large constant forcing drives y past the overflow guard.
  p = bessel(0.0, 0.0);
  p.lambda = 1e25;
  CHECK(integrate_regularized(p).truncated);
}

TEST_CASE("find_zeros: linearized spherical Bessel profile") {
  auto p = bessel(0.1);
  p.r_max = 4.0;
  const auto t = integrate_regularized(p);
  const auto z = find_zeros(t);
  REQUIRE_FALSE(z.zeros.empty());
  CHECK(z.zeros[0] == doctest::Approx(pi).epsilon(0.02));
  for (std::size_t k = 0; k < t.size(); k += 100) {
    const double r = std::max(t.r[k], 1e-3);
    CHECK(t.y[k] == doctest::Approx(0.1 * std::sin(r) / r).epsilon(0.02).scale(0.1));
  }
}

TEST_CASE("find_zeros: exact j0 samples") {
  OdeTrajectory t;
  for (int k = 0; k <= 2000; ++k) {
    const double r = 1e-3 + k * 0.01;
    t.r.push_back(r);
    t.y.push_back(std::sin(r) / r);
    t.w.push_back(std::cos(r) / r - std::sin(r) / (r * r));
  }
  const auto z = find_zeros(t);
  REQUIRE(z.zeros.size() == 6);
  for (std::size_t n = 0; n < z.zeros.size(); ++n) CHECK(std::abs(z.zeros[n] - (n + 1) * pi) <= 1e-6);
}

TEST_CASE("find_zeros: oscillation at larger amplitude and the trivial case") {
  auto p = bessel(1.0);
  p.r_max = 15.0;
  const auto z = find_zeros(integrate_regularized(p));
  REQUIRE(z.zeros.size() >= 3);
  for (std::size_t k = 1; k < z.zeros.size(); ++k) CHECK(z.zeros[k] > z.zeros[k - 1]);
  const double last_gap = z.zeros.back() - z.zeros[z.zeros.size() - 2];
  CHECK(last_gap == doctest::Approx(pi).epsilon(0.05));

  const auto flat = find_zeros(integrate_regularized(bessel(0.0)));
  CHECK(flat.zeros.empty());
  CHECK(flat.identically_at_target);
}

TEST_CASE("property: two solutions vanish at the first zero") {
  auto p = bessel(1.0);
  p.r_max = 6.0;
  const auto t = integrate_regularized(p);
  const auto z = find_zeros(t);
  REQUIRE_FALSE(z.zeros.empty());
  const double r1 = z.zeros[0];
  CHECK(std::abs(t.y_at(r1)) <= 1e-9);
  CHECK(t.y_at(0.5 * r1) > 0.1);
  const auto trivial = integrate_regularized(bessel(0.0));
  CHECK(trivial.y_at(r1) == 0.0);
  CHECK(trivial.y_at(0.5 * r1) == 0.0);
}

TEST_CASE("vanishing_regularization") {
  const auto flat = vanishing_regularization(bessel(1.0, 0.0), default_eps_sequence());
  for (double d : flat.report.differences) CHECK(d <= 1e-12);

  auto p = bessel(1.0);
  p.r_max = 10.0;
  const auto st = vanishing_regularization(p, default_eps_sequence());
  CHECK(st.trajectories.size() == 9);
  CHECK(st.report.max_h_excess <= 1e-6);
  for (std::size_t k = 1; k < st.report.differences.size(); ++k)
    CHECK(st.report.differences[k] < st.report.differences[k - 1]);
  // First order in eps: each halving roughly halves the gap.
  for (double r : st.report.ratios) CHECK(r == doctest::Approx(2.0).epsilon(0.05));
  CHECK(&st.limit() == &st.trajectories.back());

  CHECK_THROWS_AS(vanishing_regularization(p, {0.1}), InvalidArgument);
  CHECK_THROWS_AS(vanishing_regularization(p, {0.1, 0.2}), InvalidArgument);
}

TEST_CASE("shooting: nontrivial root against the half-period quadrature") {
  for (double eta : {0.5, 0.2, 0.05}) {
    const auto sol = shoot_scalar_npbe(eta);
    REQUIRE(sol.has_value());
    const double k = 1.0 - eta;
    const double amp = amplitude_oracle(k);
    CHECK(sol->sup_norm == doctest::Approx(amp).epsilon(1e-5));
    CHECK(sol->slope == doctest::Approx(std::sqrt(2.0 * k * (std::cosh(amp) - 1.0))).epsilon(1e-6));
    CHECK(sol->endpoint_residual <= 1e-8);
    CHECK(shooting_endpoint(eta, -sol->slope) == doctest::Approx(-shooting_endpoint(eta, sol->slope)));
  }
}

TEST_CASE("shooting: amplitude shrinks toward the bifurcation point") {
  double prev = 1e300;
  for (double eta : {0.2, 0.1, 0.05, 0.01}) {
    const auto sol = shoot_scalar_npbe(eta);
    REQUIRE(sol.has_value());
    CHECK(sol->sup_norm < prev);
    prev = sol->sup_norm;
  }
  CHECK(prev < 0.3);
}

TEST_CASE("shooting: below the bifurcation point only sign-changing roots appear") {
  for (double eta : {-0.01, -0.05, -0.2}) CHECK_FALSE(shoot_scalar_npbe(eta).has_value());
  const auto sol = shoot_scalar_npbe(-1.0);
  REQUIRE(sol.has_value());
  int interior_zeros = 0;
  for (std::size_t i = 2; i + 2 < sol->u.size(); ++i)
    if (sol->u[i] * sol->u[i + 1] < 0.0) ++interior_zeros;
  CHECK(interior_zeros == 1);
}

TEST_CASE("shooting: errors") {
  CHECK_THROWS_AS(shoot_bracket(0.2, 0.1, 0.2), InvalidArgument);
  CHECK_THROWS_AS(shoot_scalar_npbe(0.2, {.slope_lo = 0.0}), InvalidArgument);
  CHECK_THROWS_AS(shoot_scalar_npbe(0.2, {.length = -1.0}), InvalidArgument);
  CHECK_THROWS_AS(shooting_endpoint(0.2, 1.0, {.steps = 1}), InvalidArgument);
}

TEST_CASE("csv writers") {
  auto p = bessel(1.0);
  p.r_max = 1.0;
  p.step = 0.25;
  const auto t = integrate_regularized(p);
  std::ostringstream a, b, c;
  write_trajectory_csv(a, t);
  CHECK(a.str().rfind("r,y,w,H\n0,1,0,", 0) == 0);
  write_zeros_csv(b, ZeroSet{{3.0, 6.5}, false});
  CHECK(b.str() == "n,R\n1,3\n2,6.5\n");
  write_phase_portrait_csv(c, 1.0, 0.0, -1.0, 1.0, -1.0, 1.0, 3);
  const std::string portrait = c.str();
  CHECK(portrait.rfind("y,w,dy,dw,H\n", 0) == 0);
  CHECK(std::count(portrait.begin(), portrait.end(), '\n') == 10);
  CHECK_THROWS_AS(write_phase_portrait_csv(c, 1.0, 0.0, -1.0, 1.0, -1.0, 1.0, 1), InvalidArgument);
}
