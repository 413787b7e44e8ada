#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace npbe {

using Point = std::array<double, 3>;

/// Axis-aligned box [lower, upper] sampled by n_i equispaced nodes per axis.
/// Axes beyond `dim` are inert (one node, zero extent). Node storage order is
/// axis 0 fastest.
class Grid {
 public:
  Grid() = default;

  int dim() const noexcept { return dim_; }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  int nodes(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const;
  double max_spacing() const;

  std::size_t node_count() const noexcept { return total_; }
  std::size_t interior_count() const;
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + stride_[1] * j + stride_[2] * k;
  }
  std::array<int, 3> multi_index(std::size_t idx) const;
  Point coords(std::size_t idx) const;
  bool is_boundary(std::size_t idx) const;

  /// Box diagonal, i.e. the diameter d_Omega.
  double diameter() const;
  /// Box volume |Omega| (length for d=1, area for d=2).
  double volume() const;
  double extent(int axis) const { return upper_[axis] - lower_[axis]; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  friend Grid build_grid(int, std::span<const double>, std::span<const double>,
                         std::span<const int>);

  int dim_ = 0;
  std::array<double, 3> lower_{};
  std::array<double, 3> upper_{};
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> h_{};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t total_ = 0;
};

/// Validates and builds a grid. Node counts must be odd and >= 3 so the box
/// center is a node. Throws InvalidArgument otherwise.
Grid build_grid(int dim, std::span<const double> lower, std::span<const double> upper,
                std::span<const int> nodes_per_axis);

/// Same box [lo, hi]^dim with n nodes on every axis.
Grid build_grid(int dim, double lo, double hi, int n);

/// Nodal values of a scalar on a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.node_count(), fill) {}
  ScalarField(const Grid& grid, std::vector<double> values);

  template <class Fn>
  static ScalarField from_function(const Grid& grid, Fn&& fn) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) out.values_[i] = fn(grid.coords(i));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

enum class NormKind { L2, H1, H2, Linf };

/// Discrete Sobolev norms. L2 uses tensor trapezoid weights; H1 adds
/// forward-difference gradients; H2 adds all second derivatives (centered
/// in the interior, one-sided second order at the boundary).
double discrete_norm(const ScalarField& field, NormKind kind);

/// Tensorized trapezoidal rule over the whole box.
double integrate_field(const ScalarField& field);

/// Trapezoid weight of node `idx` (product over axes of h or h/2).
double trapezoid_weight(const Grid& grid, std::size_t idx);

}  // namespace npbe
