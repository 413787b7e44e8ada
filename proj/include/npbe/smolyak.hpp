#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <vector>

namespace npbe {

using MultiIndex = std::vector<int>;

/// Number of Clenshaw-Curtis points on level i: m(0)=0, m(1)=1, m(i)=2^{i-1}+1.
int m_of_level(int i);

/// Chebyshev extrema -cos(pi (j-1)/(m-1)), j = 1..m; {0} for m = 1.
std::vector<double> cc_nodes(int m);

/// Clenshaw-Curtis weights for the uniform probability measure on [-1, 1]
/// (they sum to one).
std::vector<double> cc_weights(int m);

/// Barycentric weights of the Chebyshev extrema: (-1)^j, halved at the ends.
std::vector<double> cc_barycentric_weights(int m);

/// All i in N_+^N with sum(i_n - 1) <= w, in lexicographic order.
std::vector<MultiIndex> index_set(int dim, int level);

/// Isotropic Smolyak grid on [-1, 1]^N with nested Clenshaw-Curtis rules.
class SparseGrid {
 public:
  /// Exact identity of a node: per axis the angle numerator over 2^30.
  using NodeKey = std::vector<std::int64_t>;

  int dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return weights_.size(); }

  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  const std::vector<int>& coefficients() const noexcept { return coefficients_; }
  std::span<const double> node(std::size_t k) const { return {nodes_.data() + k * dim_, static_cast<std::size_t>(dim_)}; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const NodeKey& key(std::size_t k) const { return keys_[k]; }
  /// Position of a node key, or size() when absent.
  std::size_t find(const NodeKey& key) const;

 private:
  friend SparseGrid build_sparse_grid(int, int);

  int dim_ = 0;
  int level_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<int> coefficients_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<NodeKey> keys_;
  std::map<NodeKey, std::size_t> lookup_;
  /// Per index: node ids of its tensor rule, odometer order (last axis fastest).
  std::vector<std::vector<std::size_t>> tensor_ids_;

  friend double interpolate(const SparseGrid&, std::span<const double>, std::span<const double>);
};

SparseGrid build_sparse_grid(int dim, int level);

/// Smolyak interpolant of the node values at `query`.
double interpolate(const SparseGrid& grid, std::span<const double> node_values, std::span<const double> query);

/// Sparse-grid quadrature sum_k weight_k value_k.
double integrate(const SparseGrid& grid, std::span<const double> node_values);

/// Coordinate of a node key component (exact, level independent).
double node_coordinate(std::int64_t numerator);

struct ConvergenceRow {
  int level;
  std::size_t eta;
  double expectation;
  double abs_error;
};

/// Expectations for levels 0..max_level against the reference level. All
/// evaluations happen once, on the nested reference grid.
std::vector<ConvergenceRow> convergence_table(const std::function<double(std::span<const double>)>& evaluator,
                                              int dim, int max_level, int reference_level);

/// One node per row: coordinates then weight.
void write_nodes_csv(std::ostream& os, const SparseGrid& grid);

}  // namespace npbe
