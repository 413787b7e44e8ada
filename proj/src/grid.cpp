#include "npbe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "npbe/error.hpp"

namespace npbe {

Grid build_grid(int dim, std::span<const double> lower, std::span<const double> upper,
                std::span<const int> nodes_per_axis) {
  if (dim < 1 || dim > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  const auto d = static_cast<std::size_t>(dim);
  if (lower.size() != d || upper.size() != d || nodes_per_axis.size() != d)
    throw InvalidArgument("grid corner/node arrays must have one entry per axis");

  Grid g;
  g.dim_ = dim;
  for (int a = 0; a < dim; ++a) {
    const int n = nodes_per_axis[a];
    if (n < 3 || n % 2 == 0)
      throw InvalidArgument("nodes per axis must be odd and >= 3, got " + std::to_string(n));
    if (!(upper[a] > lower[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
      throw InvalidArgument("degenerate box: upper corner must exceed lower corner on every axis");
    g.lower_[a] = lower[a];
    g.upper_[a] = upper[a];
    g.n_[a] = n;
    g.h_[a] = (upper[a] - lower[a]) / (n - 1);
  }
  g.stride_ = {1, static_cast<std::size_t>(g.n_[0]),
               static_cast<std::size_t>(g.n_[0]) * static_cast<std::size_t>(g.n_[1])};
  g.total_ = g.stride_[2] * static_cast<std::size_t>(g.n_[2]);
  return g;
}

Grid build_grid(int dim, double lo, double hi, int n) {
  if (dim < 1 || dim > 3) throw InvalidArgument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  std::vector<double> l(dim, lo), u(dim, hi);
  std::vector<int> nn(dim, n);
  return build_grid(dim, l, u, nn);
}

double Grid::min_spacing() const {
  double h = h_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, h_[a]);
  return h;
}

double Grid::max_spacing() const {
  double h = h_[0];
  for (int a = 1; a < dim_; ++a) h = std::max(h, h_[a]);
  return h;
}

std::size_t Grid::interior_count() const {
  std::size_t c = 1;
  for (int a = 0; a < dim_; ++a) c *= static_cast<std::size_t>(n_[a] - 2);
  return c;
}

std::array<int, 3> Grid::multi_index(std::size_t idx) const {
  const int k = static_cast<int>(idx / stride_[2]);
  idx -= static_cast<std::size_t>(k) * stride_[2];
  const int j = static_cast<int>(idx / stride_[1]);
  const int i = static_cast<int>(idx - static_cast<std::size_t>(j) * stride_[1]);
  return {i, j, k};
}

Point Grid::coords(std::size_t idx) const {
  const auto m = multi_index(idx);
  Point p{};
  for (int a = 0; a < dim_; ++a) {
    // Hit the upper face exactly instead of accumulating lower + (n-1)*h.
    p[a] = (m[a] == n_[a] - 1) ? upper_[a] : lower_[a] + m[a] * h_[a];
  }
  return p;
}

bool Grid::is_boundary(std::size_t idx) const {
  const auto m = multi_index(idx);
  for (int a = 0; a < dim_; ++a)
    if (m[a] == 0 || m[a] == n_[a] - 1) return true;
  return false;
}

double Grid::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) s += extent(a) * extent(a);
  return std::sqrt(s);
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= extent(a);
  return v;
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count())
    throw InvalidArgument("field value count " + std::to_string(values_.size()) +
                          " does not match grid node count " + std::to_string(grid_.node_count()));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid()) || a.size() != b.size())
    throw GridMismatch(std::string(what) + ": fields live on different grids");
}

double trapezoid_weight(const Grid& grid, std::size_t idx) {
  const auto m = grid.multi_index(idx);
  double w = 1.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const bool edge = (m[a] == 0 || m[a] == grid.nodes(a) - 1);
    w *= edge ? 0.5 * grid.spacing(a) : grid.spacing(a);
  }
  return w;
}

namespace {

// Trapezoid weight of all axes except `skip`.
double weight_without(const Grid& g, const std::array<int, 3>& m, int skip) {
  double w = 1.0;
  for (int a = 0; a < g.dim(); ++a) {
    if (a == skip) continue;
    const bool edge = (m[a] == 0 || m[a] == g.nodes(a) - 1);
    w *= edge ? 0.5 * g.spacing(a) : g.spacing(a);
  }
  return w;
}

// First derivative along `axis`: centered inside, one-sided second order at
// the two ends.
std::vector<double> first_derivative(const Grid& g, std::span<const double> u, int axis) {
  std::vector<double> out(u.size());
  const auto s = g.stride(axis);
  const int n = g.nodes(axis);
  const double h = g.spacing(axis);
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const int i = g.multi_index(idx)[axis];
    if (i == 0)
      out[idx] = (-3.0 * u[idx] + 4.0 * u[idx + s] - u[idx + 2 * s]) / (2.0 * h);
    else if (i == n - 1)
      out[idx] = (3.0 * u[idx] - 4.0 * u[idx - s] + u[idx - 2 * s]) / (2.0 * h);
    else
      out[idx] = (u[idx + s] - u[idx - s]) / (2.0 * h);
  }
  return out;
}

std::vector<double> second_derivative(const Grid& g, std::span<const double> u, int axis) {
  std::vector<double> out(u.size());
  const auto s = g.stride(axis);
  const int n = g.nodes(axis);
  const double h2 = g.spacing(axis) * g.spacing(axis);
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const int i = g.multi_index(idx)[axis];
    if (i == 0) {
      out[idx] = n >= 4 ? (2.0 * u[idx] - 5.0 * u[idx + s] + 4.0 * u[idx + 2 * s] - u[idx + 3 * s]) / h2
                        : (u[idx] - 2.0 * u[idx + s] + u[idx + 2 * s]) / h2;
    } else if (i == n - 1) {
      out[idx] = n >= 4 ? (2.0 * u[idx] - 5.0 * u[idx - s] + 4.0 * u[idx - 2 * s] - u[idx - 3 * s]) / h2
                        : (u[idx] - 2.0 * u[idx - s] + u[idx - 2 * s]) / h2;
    } else {
      out[idx] = (u[idx + s] - 2.0 * u[idx] + u[idx - s]) / h2;
    }
  }
  return out;
}

double weighted_sum_sq(const Grid& g, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t idx = 0; idx < v.size(); ++idx) s += trapezoid_weight(g, idx) * v[idx] * v[idx];
  return s;
}

}  // namespace

double discrete_norm(const ScalarField& field, NormKind kind) {
  const Grid& g = field.grid();
  const auto u = field.values();
  if (kind == NormKind::Linf) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }

  double total = weighted_sum_sq(g, u);
  if (kind == NormKind::L2) return std::sqrt(total);

  for (int a = 0; a < g.dim(); ++a) {
    const auto s = g.stride(a);
    const double h = g.spacing(a);
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
      const auto m = g.multi_index(idx);
      if (m[a] == g.nodes(a) - 1) continue;
      const double du = (u[idx + s] - u[idx]) / h;
      total += h * weight_without(g, m, a) * du * du;
    }
  }
  if (kind == NormKind::H1) return std::sqrt(total);

  for (int a = 0; a < g.dim(); ++a) {
    total += weighted_sum_sq(g, second_derivative(g, u, a));
    if (g.dim() == 1) continue;
    const auto da = first_derivative(g, u, a);
    for (int b = 0; b < g.dim(); ++b) {
      if (b == a) continue;
      total += weighted_sum_sq(g, first_derivative(g, da, b));
    }
  }
  return std::sqrt(total);
}

double integrate_field(const ScalarField& field) {
  const Grid& g = field.grid();
  double s = 0.0;
  for (std::size_t idx = 0; idx < field.size(); ++idx) s += trapezoid_weight(g, idx) * field[idx];
  return s;
}

}  // namespace npbe
