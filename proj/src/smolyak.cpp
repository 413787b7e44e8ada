#include "npbe/smolyak.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <string>

#include "npbe/error.hpp"

namespace npbe {

namespace {

constexpr int kDenominatorBits = 30;
constexpr std::int64_t kDenominator = std::int64_t{1} << kDenominatorBits;

// Chebyshev extremum for the angle fraction t in [0, 1], mirrored so that
// x(1 - t) == -x(t) bit for bit and the midpoint is exactly zero.
double extremum(double t_num, double t_den) {
  if (2.0 * t_num == t_den) return 0.0;
  if (2.0 * t_num < t_den) return -std::cos(std::numbers::pi * (t_num / t_den));
  return std::cos(std::numbers::pi * ((t_den - t_num) / t_den));
}

std::int64_t key_numerator(int level, int j) {
  const int m = m_of_level(level);
  if (m == 1) return kDenominator / 2;
  return static_cast<std::int64_t>(j) * (kDenominator >> (level - 1));
}

// Advances a mixed-radix counter (last axis fastest); false when wrapped.
bool advance(std::vector<int>& counter, const std::vector<int>& radix) {
  for (int a = static_cast<int>(counter.size()) - 1; a >= 0; --a) {
    if (++counter[a] < radix[a]) return true;
    counter[a] = 0;
  }
  return false;
}

int combination_coefficient(const MultiIndex& i, int level) {
  const int dim = static_cast<int>(i.size());
  int g = 0;
  for (int v : i) g += v - 1;
  int c = 0;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    const int bits = std::popcount(static_cast<unsigned>(mask));
    if (g + bits <= level) c += (bits % 2) ? -1 : 1;
  }
  return c;
}

void check_dims(int dim, int level) {
  if (dim < 1) throw InvalidArgument("sparse grid dimension must be >= 1");
  if (level < 0) throw InvalidArgument("sparse grid level must be >= 0");
  if (level + 1 > kDenominatorBits) throw InvalidArgument("sparse grid level too large");
}

}  // namespace

int m_of_level(int i) {
  if (i < 0) throw InvalidArgument("m_of_level: level must be non-negative");
  if (i == 0) return 0;
  if (i == 1) return 1;
  if (i > kDenominatorBits) throw InvalidArgument("m_of_level: level too large");
  return (1 << (i - 1)) + 1;
}

std::vector<double> cc_nodes(int m) {
  if (m <= 0) throw InvalidArgument("cc_nodes: need at least one node");
  if (m == 1) return {0.0};
  std::vector<double> x(m);
  for (int j = 0; j < m; ++j) x[j] = extremum(j, m - 1);
  return x;
}

std::vector<double> cc_weights(int m) {
  if (m <= 0) throw InvalidArgument("cc_weights: need at least one node");
  if (m == 1) return {1.0};
  const int n = m - 1;
  std::vector<double> w(m);
  for (int j = 0; 2 * j <= n; ++j) {
    double s = 1.0;
    for (int k = 1; 2 * k <= n; ++k) {
      const double b = (2 * k == n) ? 1.0 : 2.0;
      s -= b / (4.0 * k * k - 1.0) * std::cos(2.0 * std::numbers::pi * k * j / n);
    }
    const double c = (j == 0) ? 1.0 : 2.0;
    // Halved: probability measure with density 1/2.
    w[j] = 0.5 * c / n * s;
    w[n - j] = w[j];
  }
  return w;
}

std::vector<double> cc_barycentric_weights(int m) {
  if (m <= 0) throw InvalidArgument("cc_barycentric_weights: need at least one node");
  if (m == 1) return {1.0};
  std::vector<double> w(m);
  for (int j = 0; j < m; ++j) w[j] = (j % 2) ? -1.0 : 1.0;
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double node_coordinate(std::int64_t numerator) {
  return extremum(static_cast<double>(numerator), static_cast<double>(kDenominator));
}

std::vector<MultiIndex> index_set(int dim, int level) {
  check_dims(dim, level);
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 1);
  // Depth-first over axes in order gives lexicographic output.
  auto rec = [&](auto&& self, int axis, int budget) -> void {
    if (axis == dim) {
      out.push_back(cur);
      return;
    }
    for (int v = 1; v - 1 <= budget; ++v) {
      cur[axis] = v;
      self(self, axis + 1, budget - (v - 1));
    }
    cur[axis] = 1;
  };
  rec(rec, 0, level);
  return out;
}

std::size_t SparseGrid::find(const NodeKey& key) const {
  const auto it = lookup_.find(key);
  return it == lookup_.end() ? size() : it->second;
}

SparseGrid build_sparse_grid(int dim, int level) {
  check_dims(dim, level);
  SparseGrid g;
  g.dim_ = dim;
  g.level_ = level;
  g.indices_ = index_set(dim, level);

  std::vector<std::vector<double>> weights_1d(level + 2);
  for (int l = 1; l <= level + 1; ++l) weights_1d[l] = cc_weights(m_of_level(l));

  for (const auto& idx : g.indices_) {
    const int c = combination_coefficient(idx, level);
    g.coefficients_.push_back(c);

    std::vector<int> radix(dim);
    for (int a = 0; a < dim; ++a) radix[a] = m_of_level(idx[a]);
    std::vector<int> counter(dim, 0);
    std::vector<std::size_t> ids;
    do {
      SparseGrid::NodeKey key(dim);
      double w = c;
      for (int a = 0; a < dim; ++a) {
        key[a] = key_numerator(idx[a], counter[a]);
        w *= weights_1d[idx[a]][counter[a]];
      }
      auto [it, inserted] = g.lookup_.try_emplace(key, g.keys_.size());
      if (inserted) {
        g.keys_.push_back(key);
        for (auto num : key) g.nodes_.push_back(node_coordinate(num));
        g.weights_.push_back(0.0);
      }
      g.weights_[it->second] += w;
      ids.push_back(it->second);
    } while (advance(counter, radix));
    g.tensor_ids_.push_back(std::move(ids));
  }
  return g;
}

double interpolate(const SparseGrid& grid, std::span<const double> node_values, std::span<const double> query) {
  const int dim = grid.dim();
  if (node_values.size() != grid.size())
    throw InvalidArgument("interpolate: expected " + std::to_string(grid.size()) + " node values");
  if (query.size() != static_cast<std::size_t>(dim)) throw InvalidArgument("interpolate: query dimension mismatch");

  // Lagrange basis values per (level, axis).
  const int max_level = grid.level() + 1;
  std::vector<std::vector<std::vector<double>>> basis(max_level + 1, std::vector<std::vector<double>>(dim));
  for (int l = 1; l <= max_level; ++l) {
    const int m = m_of_level(l);
    const auto x = cc_nodes(m);
    const auto bw = cc_barycentric_weights(m);
    for (int a = 0; a < dim; ++a) {
      auto& b = basis[l][a];
      b.assign(m, 0.0);
      if (m == 1) {
        b[0] = 1.0;
        continue;
      }
      const double y = query[a];
      int hit = -1;
      for (int j = 0; j < m; ++j)
        if (y == x[j]) hit = j;
      if (hit >= 0) {
        b[hit] = 1.0;
        continue;
      }
      double denom = 0.0;
      for (int j = 0; j < m; ++j) {
        b[j] = bw[j] / (y - x[j]);
        denom += b[j];
      }
      for (double& v : b) v /= denom;
    }
  }

  double total = 0.0;
  for (std::size_t t = 0; t < grid.indices().size(); ++t) {
    const int c = grid.coefficients()[t];
    if (c == 0) continue;
    const auto& idx = grid.indices()[t];
    std::vector<int> radix(dim), counter(dim, 0);
    for (int a = 0; a < dim; ++a) radix[a] = m_of_level(idx[a]);
    double sum = 0.0;
    std::size_t k = 0;
    do {
      double prod = node_values[grid.tensor_ids_[t][k++]];
      for (int a = 0; a < dim; ++a) prod *= basis[idx[a]][a][counter[a]];
      sum += prod;
    } while (advance(counter, radix));
    total += c * sum;
  }
  return total;
}

double integrate(const SparseGrid& grid, std::span<const double> node_values) {
  if (node_values.size() != grid.size())
    throw InvalidArgument("integrate: expected " + std::to_string(grid.size()) + " node values");
  double s = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) s += grid.weights()[k] * node_values[k];
  return s;
}

std::vector<ConvergenceRow> convergence_table(const std::function<double(std::span<const double>)>& evaluator,
                                              int dim, int max_level, int reference_level) {
  if (reference_level <= max_level)
    throw InvalidArgument("convergence_table: reference level must exceed the study levels");
  const auto ref = build_sparse_grid(dim, reference_level);
  std::vector<double> values(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    try {
      values[k] = evaluator(ref.node(k));
    } catch (const std::exception& e) {
      std::string where;
      for (double v : ref.node(k)) where += (where.empty() ? "" : ",") + std::to_string(v);
      throw Error("convergence_table: evaluator failed at node (" + where + "): " + e.what());
    }
  }
  const double e_ref = integrate(ref, values);

  std::vector<ConvergenceRow> rows;
  for (int w = 0; w <= max_level; ++w) {
    const auto g = build_sparse_grid(dim, w);
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = values[ref.find(g.key(k))];
    const double e = integrate(g, v);
    rows.push_back({w, g.size(), e, std::abs(e - e_ref)});
  }
  return rows;
}

void write_nodes_csv(std::ostream& os, const SparseGrid& grid) {
  const auto old = os.precision(17);
  for (int a = 0; a < grid.dim(); ++a) os << 'y' << a + 1 << ',';
  os << "weight\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (double v : grid.node(k)) os << v << ',';
    os << grid.weights()[k] << '\n';
  }
  os.precision(old);
}

}  // namespace npbe
