#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "npbe/error.hpp"
#include "npbe/error_bounds.hpp"
#include "npbe/smolyak.hpp"
#include "oracles.hpp"

using namespace npbe;
using oracle::pi;

namespace {

using oracle::Fn;
using oracle::telescoped;

std::vector<double> node_values(const SparseGrid& g, const Fn& f) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) v[k] = f({g.node(k).begin(), g.node(k).end()});
  return v;
}

}  // namespace

TEST_CASE("m_of_level") {
  CHECK(m_of_level(0) == 0);
  CHECK(m_of_level(1) == 1);
  CHECK(m_of_level(2) == 3);
  CHECK(m_of_level(3) == 5);
  CHECK(m_of_level(4) == 9);
  CHECK(m_of_level(5) == 17);
  CHECK_THROWS_AS(m_of_level(-1), InvalidArgument);
}

TEST_CASE("cc_nodes") {
  CHECK(cc_nodes(1) == std::vector<double>{0.0});
  const auto x3 = cc_nodes(3);
  CHECK(x3[0] == -1.0);
  CHECK(x3[1] == 0.0);
  CHECK(x3[2] == 1.0);
  const auto x5 = cc_nodes(5);
  CHECK(x5[1] == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(x5[3] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  for (int m : {3, 5, 9, 17, 33})
    for (int j = 0; j < m; ++j) CHECK(cc_nodes(m)[j] == -cc_nodes(m)[m - 1 - j]);
  CHECK_THROWS_AS(cc_nodes(0), InvalidArgument);
}

TEST_CASE("cc_weights integrate polynomials exactly") {
  for (int m : {3, 5, 9, 17}) {
    const auto x = cc_nodes(m);
    const auto w = cc_weights(m);
    for (int deg = 0; deg < m; ++deg) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += w[j] * std::pow(x[j], deg);
      const double exact = deg % 2 ? 0.0 : 1.0 / (deg + 1.0);
      CHECK(s == doctest::Approx(exact).epsilon(1e-14).scale(1.0));
    }
  }
}

TEST_CASE("index_set") {
  CHECK(index_set(2, 0) == std::vector<MultiIndex>{{1, 1}});
  CHECK(index_set(2, 1) == std::vector<MultiIndex>{{1, 1}, {1, 2}, {2, 1}});
  CHECK(index_set(3, 2).size() == 10);
  for (int n = 1; n <= 5; ++n)
    for (int w = 0; w <= 5; ++w) {
      const auto s = index_set(n, w);
      CHECK(s.size() == static_cast<std::size_t>(oracle::choose(n + w, n)));
      CHECK(std::is_sorted(s.begin(), s.end()));
    }
  CHECK_THROWS_AS(index_set(0, 1), InvalidArgument);
  CHECK_THROWS_AS(index_set(2, -1), InvalidArgument);
}

TEST_CASE("build_sparse_grid: node counts and layout") {
  const auto one = build_sparse_grid(1, 2);
  REQUIRE(one.size() == 5);
  std::vector<double> xs;
  for (std::size_t k = 0; k < one.size(); ++k) xs.push_back(one.node(k)[0]);
  std::sort(xs.begin(), xs.end());
  CHECK(xs == cc_nodes(5));

  const auto g1 = build_sparse_grid(2, 1);
  CHECK(g1.size() == 5);
  std::set<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < g1.size(); ++k) pts.insert({g1.node(k)[0], g1.node(k)[1]});
  CHECK(pts == std::set<std::pair<double, double>>{{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}});

  CHECK(build_sparse_grid(2, 2).size() == 13);
  CHECK(build_sparse_grid(2, 0).size() == 1);
  CHECK_THROWS_AS(build_sparse_grid(0, 1), InvalidArgument);
}

TEST_CASE("property: quadrature weights sum to one") {
  for (int n = 1; n <= 4; ++n)
    for (int w = 0; w <= 5; ++w) {
      const auto g = build_sparse_grid(n, w);
      double s = 0.0;
      for (double v : g.weights()) s += v;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("property: nesting and uniqueness of nodes") {
  for (int n = 1; n <= 3; ++n)
    for (int w = 0; w < 5; ++w) {
      const auto coarse = build_sparse_grid(n, w);
      const auto fine = build_sparse_grid(n, w + 1);
      for (std::size_t k = 0; k < coarse.size(); ++k) {
        const auto at = fine.find(coarse.key(k));
        REQUIRE(at < fine.size());
        for (int a = 0; a < n; ++a) CHECK(fine.node(at)[a] == coarse.node(k)[a]);
      }
      for (std::size_t i = 0; i < fine.size(); ++i)
        for (std::size_t j = i + 1; j < fine.size(); ++j) {
          double d = 0.0;
          for (int a = 0; a < n; ++a) d = std::max(d, std::abs(fine.node(i)[a] - fine.node(j)[a]));
          CHECK(d > 1e-14);
        }
    }
}

TEST_CASE("property: combination coefficients reproduce the telescoped operator") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Fn> fns{
      [](const std::vector<double>& y) { return std::exp(0.7 * y[0] - 0.3 * y.back()); },
      [](const std::vector<double>& y) { return 1.0 / (2.0 + y[0] + 0.5 * y.back()); },
      [](const std::vector<double>& y) { return std::sin(2.0 * y[0]) * std::cos(y.back()); },
      [](const std::vector<double>& y) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return 1.0 / (1.0 + 0.5 * s);
      },
      [](const std::vector<double>& y) { return std::cosh(y[0] * y.back()) + y[0]; },
  };
  for (auto [n, w] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}}) {
    const auto g = build_sparse_grid(n, w);
    for (const auto& f : fns) {
      const auto v = node_values(g, f);
      for (int t = 0; t < 10; ++t) {
        std::vector<double> y(n);
        for (double& c : y) c = U(rng);
        CHECK(std::abs(interpolate(g, v, y) - telescoped(f, n, w, y)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("property: polynomial exactness on the Smolyak space") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto [n, w] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}}) {
    // Monomials y^alpha with alpha_a < m(i_a) for some admissible i.
    std::set<std::vector<int>> alphas;
    for (const auto& i : index_set(n, w)) {
      std::vector<int> c(n, 0);
      while (true) {
        alphas.insert(c);
        int a = n - 1;
        while (a >= 0 && ++c[a] == m_of_level(i[a])) c[a--] = 0;
        if (a < 0) break;
      }
    }
    std::vector<std::pair<std::vector<int>, double>> poly;
    for (const auto& a : alphas) poly.push_back({a, U(rng)});
    Fn p = [&](const std::vector<double>& y) {
      double s = 0.0;
      for (const auto& [a, c] : poly) {
        double t = c;
        for (int k = 0; k < n; ++k) t *= std::pow(y[k], a[k]);
        s += t;
      }
      return s;
    };
    const auto g = build_sparse_grid(n, w);
    const auto v = node_values(g, p);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> y(n);
      for (double& c : y) c = U(rng);
      CHECK(interpolate(g, v, y) == doctest::Approx(p(y)).epsilon(1e-12).scale(1.0));
      // Full tensor interpolation on the same rules agrees as well.
      CHECK(interpolate(g, v, y) == doctest::Approx(telescoped(p, n, w, y)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("interpolate examples") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto g1 = build_sparse_grid(2, 1), g2 = build_sparse_grid(2, 2);
  const auto c = node_values(g1, [](const std::vector<double>&) { return 4.25; });
  const auto lin = node_values(g1, [](const std::vector<double>& y) { return y[0] + y[1]; });
  const Fn cross = [](const std::vector<double>& y) { return y[0] * y[1]; };
  const auto x1 = node_values(g1, cross), x2 = node_values(g2, cross);
  double worst1 = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> y{U(rng), U(rng)};
    CHECK(interpolate(g1, c, y) == doctest::Approx(4.25).epsilon(1e-14));
    CHECK(interpolate(g1, lin, y) == doctest::Approx(y[0] + y[1]).epsilon(1e-13).scale(1.0));
    worst1 = std::max(worst1, std::abs(interpolate(g1, x1, y) - cross(y)));
    CHECK(interpolate(g2, x2, y) == doctest::Approx(cross(y)).epsilon(1e-13).scale(1.0));
  }
  CHECK(worst1 > 0.1);

  // Exact at nodes.
  const auto g = build_sparse_grid(3, 3);
  const auto v = node_values(g, [](const std::vector<double>& y) { return std::exp(y[0]) * std::sin(y[1] + y[2]); });
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(interpolate(g, v, g.node(k)) == doctest::Approx(v[k]).epsilon(1e-13).scale(1.0));

  const std::vector<double> bad(2, 0.0);
  CHECK_THROWS_AS(interpolate(g, v, bad), InvalidArgument);
  CHECK_THROWS_AS(interpolate(g, bad, std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST_CASE("integrate examples") {
  for (int w = 0; w <= 4; ++w) {
    const auto g = build_sparse_grid(2, w);
    CHECK(integrate(g, node_values(g, [](const std::vector<double>&) { return 1.0; })) == doctest::Approx(1.0));
    CHECK(std::abs(integrate(g, node_values(g, [](const std::vector<double>& y) { return y[0] * y[1]; }))) < 1e-15);
    if (w >= 1)
      CHECK(integrate(g, node_values(g, [](const std::vector<double>& y) { return y[0] * y[0]; })) ==
            doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  const auto g = build_sparse_grid(2, 1);
  CHECK_THROWS_AS(integrate(g, std::vector<double>(3, 0.0)), InvalidArgument);
}

TEST_CASE("convergence_table") {
  std::size_t calls = 0;
  const auto rows = convergence_table(
      [&](std::span<const double> y) {
        ++calls;
        return std::exp(y[0]);
      },
      2, 3, 5);
  CHECK(calls == build_sparse_grid(2, 5).size());
  REQUIRE(rows.size() == 4);
  const double exact = std::sinh(1.0);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double e0 = std::abs(rows[k - 1].expectation - exact), e1 = std::abs(rows[k].expectation - exact);
    CHECK(e1 < e0);
    // Faster than eta^-2.
    CHECK(e1 * std::pow(double(rows[k].eta), 2) < e0 * std::pow(double(rows[k - 1].eta), 2));
  }

  const auto lin = convergence_table([](std::span<const double> y) { return 2.0 + y[0] - 3.0 * y[1]; }, 2, 3, 4);
  for (std::size_t k = 1; k < lin.size(); ++k) CHECK(lin[k].abs_error < 1e-14);

  CHECK_THROWS_AS(convergence_table([](std::span<const double>) { return 0.0; }, 2, 3, 3), InvalidArgument);
  try {
    convergence_table(
        [](std::span<const double> y) -> double {
          if (y[0] == 1.0) throw std::runtime_error("boom");
          return 0.0;
        },
        1, 1, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
    CHECK(std::string(e.what()).find("1.0") != std::string::npos);
  }
}

TEST_CASE("convergence_table: analytic function decays sub-exponentially in eta") {
  const int n = 2;
  const auto rows = convergence_table(
      [](std::span<const double> y) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return 1.0 / (1.0 + 0.5 * s);
      },
      n, 5, 8);
  const double mu2 = bound_constants(n, 1.0, 1.0).mu2;
  std::vector<double> xs, ys;
  for (const auto& r : rows)
    if (r.level >= 1) {
      xs.push_back(std::pow(double(r.eta), mu2));
      ys.push_back(std::log(r.abs_error));
    }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  CHECK(sxy < 0.0);
  CHECK(sxy * sxy / (sxx * syy) >= 0.9);
}

TEST_CASE("write_nodes_csv") {
  std::ostringstream os;
  write_nodes_csv(os, build_sparse_grid(2, 1));
  const auto s = os.str();
  CHECK(s.rfind("y1,y2,weight\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}
