#pragma once

// Compressed sparse row storage, vertex index sets, weighted graphs, and the
// matrix kernels the extraction algorithms are built from.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsclust/errors.hpp"

namespace lsclust {

using Index = std::size_t;
using Vector = std::vector<double>;

/// Sorted, duplicate-free set of vertex ids.
class IndexSet {
 public:
  IndexSet() = default;

  /// Sorts and deduplicates.
  explicit IndexSet(std::vector<Index> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  IndexSet(std::initializer_list<Index> ids) : IndexSet(std::vector<Index>(ids)) {}

  static IndexSet range(Index n) {
    std::vector<Index> ids(n);
    std::iota(ids.begin(), ids.end(), Index{0});
    return from_sorted(std::move(ids));
  }

  /// Caller guarantees `ids` is strictly increasing.
  static IndexSet from_sorted(std::vector<Index> ids) {
    IndexSet s;
    s.ids_ = std::move(ids);
    return s;
  }

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  Index operator[](std::size_t i) const { return ids_[i]; }
  auto begin() const noexcept { return ids_.begin(); }
  auto end() const noexcept { return ids_.end(); }
  const std::vector<Index>& ids() const noexcept { return ids_; }

  bool contains(Index v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

  /// Throws IndexError if any id is >= n.
  void validate(Index n) const {
    if (!ids_.empty() && ids_.back() >= n) {
      throw IndexError("index " + std::to_string(ids_.back()) + " out of range for size " +
                       std::to_string(n));
    }
  }

  bool is_subset_of(const IndexSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
  }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<Index> ids_;
};

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet::from_sorted(std::move(out));
}

inline IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet::from_sorted(std::move(out));
}

inline IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return IndexSet::from_sorted(std::move(out));
}

inline IndexSet set_symmetric_difference(const IndexSet& a, const IndexSet& b) {
  std::vector<Index> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return IndexSet::from_sorted(std::move(out));
}

/// Dense indicator vector of `s` in R^n.
inline Vector indicator(const IndexSet& s, Index n) {
  s.validate(n);
  Vector v(n, 0.0);
  for (Index i : s) v[i] = 1.0;
  return v;
}

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Real CSR matrix. Column indices are strictly increasing within each row and
/// no stored value is exactly zero; both are enforced on construction.
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_(1, 0) {}

  /// Builds from unordered triplets. Duplicate coordinates are summed and
  /// entries that end up exactly zero are dropped.
  SparseMatrix(Index n_rows, Index n_cols, std::vector<Triplet> triplets)
      : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(n_rows + 1, 0) {
    for (const auto& t : triplets) {
      if (t.row >= n_rows || t.col >= n_cols) {
        throw IndexError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                         ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
      }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    col_idx_.reserve(triplets.size());
    values_.reserve(triplets.size());
    std::size_t k = 0;
    for (Index r = 0; r < n_rows; ++r) {
      while (k < triplets.size() && triplets[k].row == r) {
        const Index c = triplets[k].col;
        double sum = 0.0;
        while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
          sum += triplets[k].value;
          ++k;
        }
        if (sum != 0.0) {
          col_idx_.push_back(c);
          values_.push_back(sum);
        }
      }
      row_ptr_[r + 1] = col_idx_.size();
    }
  }

  /// Adopts raw CSR arrays. Validates the structure and drops explicit zeros.
  static SparseMatrix from_csr(Index n_rows, Index n_cols, std::vector<std::size_t> row_ptr,
                               std::vector<Index> col_idx, Vector values) {
    if (row_ptr.size() != n_rows + 1 || row_ptr.front() != 0 ||
        row_ptr.back() != col_idx.size() || col_idx.size() != values.size()) {
      throw DimensionError("inconsistent CSR array lengths");
    }
    bool has_zero = false;
    for (Index r = 0; r < n_rows; ++r) {
      if (row_ptr[r + 1] < row_ptr[r]) throw DimensionError("row_ptr is decreasing");
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        if (col_idx[k] >= n_cols) throw IndexError("column index out of range");
        if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1]) {
          throw IndexError("column indices not strictly increasing in row " + std::to_string(r));
        }
        has_zero = has_zero || values[k] == 0.0;
      }
    }
    if (has_zero) {
      std::size_t out = 0, k = 0;
      for (Index r = 0; r < n_rows; ++r) {
        for (; k < row_ptr[r + 1]; ++k) {
          if (values[k] == 0.0) continue;
          col_idx[out] = col_idx[k];
          values[out] = values[k];
          ++out;
        }
        row_ptr[r + 1] = out;
      }
      col_idx.resize(out);
      values.resize(out);
    }
    SparseMatrix m;
    m.n_rows_ = n_rows;
    m.n_cols_ = n_cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.values_ = std::move(values);
    return m;
  }

  static SparseMatrix identity(Index n) {
    std::vector<std::size_t> rp(n + 1);
    std::iota(rp.begin(), rp.end(), std::size_t{0});
    std::vector<Index> ci(n);
    std::iota(ci.begin(), ci.end(), Index{0});
    return from_csr(n, n, std::move(rp), std::move(ci), Vector(n, 1.0));
  }

  static SparseMatrix diagonal(std::span<const double> d) {
    std::vector<Triplet> t;
    t.reserve(d.size());
    for (Index i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return SparseMatrix(d.size(), d.size(), std::move(t));
  }

  Index rows() const noexcept { return n_rows_; }
  Index cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const Index> row_cols(Index r) const {
    return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(Index r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  /// Entry lookup by binary search within the row; zero when not stored.
  double at(Index r, Index c) const {
    if (r >= n_rows_ || c >= n_cols_) throw IndexError("entry lookup out of range");
    auto cols = row_cols(r);
    auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (Index r = 0; r < n_rows_; ++r) {
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        out.push_back({r, col_idx_[k], values_[k]});
      }
    }
    return out;
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> col_idx_;
  Vector values_;
};

/// y = M x.
inline Vector spmv(const SparseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) {
    throw DimensionError("spmv: vector length " + std::to_string(x.size()) + " != " +
                         std::to_string(m.cols()) + " columns");
  }
  Vector y(m.rows(), 0.0);
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto va = m.values();
  for (Index r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) acc += va[k] * x[ci[k]];
    y[r] = acc;
  }
  return y;
}

/// y = M^T x without forming the transpose.
inline Vector spmv_transpose(const SparseMatrix& m, std::span<const double> x) {
  if (x.size() != m.rows()) {
    throw DimensionError("spmv_transpose: vector length " + std::to_string(x.size()) +
                         " != " + std::to_string(m.rows()) + " rows");
  }
  Vector y(m.cols(), 0.0);
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto va = m.values();
  for (Index r = 0; r < m.rows(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) y[ci[k]] += va[k] * xr;
  }
  return y;
}

inline SparseMatrix transpose(const SparseMatrix& m) {
  std::vector<std::size_t> rp(m.cols() + 1, 0);
  for (Index c : m.col_idx()) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<Index> ci(m.nnz());
  Vector va(m.nnz());
  std::vector<std::size_t> next(rp.begin(), rp.end() - 1);
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t dst = next[cols[k]]++;
      ci[dst] = r;
      va[dst] = vals[k];
    }
  }
  return SparseMatrix::from_csr(m.cols(), m.rows(), std::move(rp), std::move(ci), std::move(va));
}

/// alpha*A + beta*B.
inline SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                        double beta = 1.0) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("add: shape mismatch");
  std::vector<std::size_t> rp(a.rows() + 1, 0);
  std::vector<Index> ci;
  Vector va;
  ci.reserve(a.nnz() + b.nnz());
  va.reserve(a.nnz() + b.nnz());
  for (Index r = 0; r < a.rows(); ++r) {
    auto ac = a.row_cols(r), bc = b.row_cols(r);
    auto av = a.row_values(r), bv = b.row_values(r);
    std::size_t i = 0, j = 0;
    while (i < ac.size() || j < bc.size()) {
      if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
        ci.push_back(ac[i]);
        va.push_back(alpha * av[i++]);
      } else if (i == ac.size() || bc[j] < ac[i]) {
        ci.push_back(bc[j]);
        va.push_back(beta * bv[j++]);
      } else {
        ci.push_back(ac[i]);
        va.push_back(alpha * av[i++] + beta * bv[j++]);
      }
    }
    rp[r + 1] = ci.size();
  }
  return SparseMatrix::from_csr(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(va));
}

/// Sparse product A*B (Gustavson). Within each output entry the partial
/// products are accumulated in ascending order of the inner index.
inline SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  std::vector<std::size_t> rp(a.rows() + 1, 0);
  std::vector<Index> ci;
  Vector va;
  Vector acc(b.cols(), 0.0);
  std::vector<char> used(b.cols(), 0);
  std::vector<Index> pattern;
  for (Index r = 0; r < a.rows(); ++r) {
    pattern.clear();
    auto ac = a.row_cols(r);
    auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      auto bc = b.row_cols(ac[k]);
      auto bv = b.row_values(ac[k]);
      for (std::size_t m = 0; m < bc.size(); ++m) {
        if (!used[bc[m]]) {
          used[bc[m]] = 1;
          pattern.push_back(bc[m]);
        }
        acc[bc[m]] += av[k] * bv[m];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (Index c : pattern) {
      ci.push_back(c);
      va.push_back(acc[c]);
      acc[c] = 0.0;
      used[c] = 0;
    }
    rp[r + 1] = ci.size();
  }
  return SparseMatrix::from_csr(a.rows(), b.cols(), std::move(rp), std::move(ci), std::move(va));
}

/// Row i scaled by s[i].
inline SparseMatrix scale_rows(const SparseMatrix& m, std::span<const double> s) {
  if (s.size() != m.rows()) throw DimensionError("scale_rows: length mismatch");
  const auto rp = m.row_ptr();
  Vector va(m.values().begin(), m.values().end());
  for (Index r = 0; r < m.rows(); ++r) {
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) va[k] *= s[r];
  }
  return SparseMatrix::from_csr(m.rows(), m.cols(), {rp.begin(), rp.end()},
                                {m.col_idx().begin(), m.col_idx().end()}, std::move(va));
}

/// Column j scaled by s[j].
inline SparseMatrix scale_cols(const SparseMatrix& m, std::span<const double> s) {
  if (s.size() != m.cols()) throw DimensionError("scale_cols: length mismatch");
  const auto ci = m.col_idx();
  Vector va(m.values().begin(), m.values().end());
  for (std::size_t k = 0; k < va.size(); ++k) va[k] *= s[ci[k]];
  return SparseMatrix::from_csr(m.rows(), m.cols(), {m.row_ptr().begin(), m.row_ptr().end()},
                                {ci.begin(), ci.end()}, std::move(va));
}

/// Columns of M restricted to `columns`, in the order of the set. Column j of
/// `matrix` is column `columns[j]` of the source.
struct ColumnSubmatrix {
  SparseMatrix matrix;
  IndexSet columns;

  /// Scatters a solution on the selected columns back to source column ids.
  Vector expand(std::span<const double> x, double fill = 0.0) const {
    if (x.size() != columns.size()) throw DimensionError("expand: length mismatch");
    Vector out(original_cols, fill);
    for (std::size_t j = 0; j < x.size(); ++j) out[columns[j]] = x[j];
    return out;
  }

  Index original_cols = 0;
};

inline ColumnSubmatrix column_submatrix(const SparseMatrix& m, const IndexSet& columns) {
  columns.validate(m.cols());
  constexpr Index kAbsent = static_cast<Index>(-1);
  std::vector<Index> remap(m.cols(), kAbsent);
  for (std::size_t j = 0; j < columns.size(); ++j) remap[columns[j]] = j;
  std::vector<std::size_t> rp(m.rows() + 1, 0);
  std::vector<Index> ci;
  Vector va;
  ci.reserve(m.nnz());
  va.reserve(m.nnz());
  for (Index r = 0; r < m.rows(); ++r) {
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (remap[cols[k]] != kAbsent) {
        ci.push_back(remap[cols[k]]);
        va.push_back(vals[k]);
      }
    }
    rp[r + 1] = ci.size();
  }
  return {SparseMatrix::from_csr(m.rows(), columns.size(), std::move(rp), std::move(ci),
                                 std::move(va)),
          columns, m.cols()};
}

/// |M|^T |y|: entry j is sum_i |M_ij| |y_i|.
inline Vector abs_matvec_transpose(const SparseMatrix& m, std::span<const double> y) {
  if (y.size() != m.rows()) {
    throw DimensionError("abs_matvec_transpose: vector length " + std::to_string(y.size()) +
                         " != " + std::to_string(m.rows()) + " rows");
  }
  Vector out(m.cols(), 0.0);
  for (Index r = 0; r < m.rows(); ++r) {
    const double yr = std::abs(y[r]);
    if (yr == 0.0) continue;
    auto cols = m.row_cols(r);
    auto vals = m.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += std::abs(vals[k]) * yr;
  }
  return out;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

enum class SymmetryRepair { none, average };

/// Undirected graph with non-negative weights, no self-loops, and a cached
/// weighted degree vector.
class Graph {
 public:
  Graph() = default;

  /// Validates the adjacency. With `SymmetryRepair::average`, A is replaced by
  /// (A + A^T)/2 before validation.
  explicit Graph(SparseMatrix adjacency, SymmetryRepair repair = SymmetryRepair::none) {
    if (adjacency.rows() != adjacency.cols()) throw DimensionError("adjacency must be square");
    if (repair == SymmetryRepair::average) {
      adjacency = add(adjacency, transpose(adjacency), 0.5, 0.5);
    }
    const Index n = adjacency.rows();
    for (Index r = 0; r < n; ++r) {
      auto cols = adjacency.row_cols(r);
      auto vals = adjacency.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] == r) throw GraphError("self-loop at vertex " + std::to_string(r));
        if (!(vals[k] >= 0.0) || !std::isfinite(vals[k])) {
          throw GraphError("negative or non-finite weight at (" + std::to_string(r) + ", " +
                           std::to_string(cols[k]) + ")");
        }
        const double mirrored = adjacency.at(cols[k], r);
        if (std::abs(vals[k] - mirrored) > 1e-12 * std::max(1.0, std::abs(vals[k]))) {
          throw GraphError("adjacency is not symmetric at (" + std::to_string(r) + ", " +
                           std::to_string(cols[k]) + ")");
        }
      }
    }
    degrees_.assign(n, 0.0);
    for (Index r = 0; r < n; ++r) {
      for (double w : adjacency.row_values(r)) degrees_[r] += w;
    }
    adjacency_ = std::move(adjacency);
  }

  struct Edge {
    Index u;
    Index v;
    double weight = 1.0;
  };

  /// Undirected edge list; duplicate edges have their weights summed.
  static Graph from_edges(Index n, std::span<const Edge> edges) {
    std::vector<Triplet> t;
    t.reserve(2 * edges.size());
    for (const auto& e : edges) {
      if (e.u == e.v) throw GraphError("self-loop at vertex " + std::to_string(e.u));
      t.push_back({e.u, e.v, e.weight});
      t.push_back({e.v, e.u, e.weight});
    }
    return Graph(SparseMatrix(n, n, std::move(t)));
  }

  Index size() const noexcept { return adjacency_.rows(); }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  std::span<const double> degrees() const noexcept { return degrees_; }
  double degree(Index i) const { return degrees_[i]; }

  /// Edges with u < v, in row-major order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Index r = 0; r < size(); ++r) {
      auto cols = adjacency_.row_cols(r);
      auto vals = adjacency_.row_values(r);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] > r) out.push_back({r, cols[k], vals[k]});
      }
    }
    return out;
  }

  /// First vertex with zero degree, or size() if none.
  Index first_isolated() const {
    for (Index i = 0; i < size(); ++i) {
      if (degrees_[i] <= 0.0) return i;
    }
    return size();
  }

 private:
  SparseMatrix adjacency_;
  Vector degrees_;
};

namespace detail {
inline Vector inverse_degrees(const Graph& g) {
  Vector inv(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    if (!(g.degree(i) > 0.0)) throw IsolatedVertexError(i);
    inv[i] = 1.0 / g.degree(i);
  }
  return inv;
}
}  // namespace detail

/// Random walk Laplacian L = I - D^{-1} A. Diagonal entries are exactly 1.
inline SparseMatrix rw_laplacian(const Graph& g) {
  const Vector inv = detail::inverse_degrees(g);
  const SparseMatrix& a = g.adjacency();
  const Index n = g.size();
  const auto arp = a.row_ptr();
  const auto aci = a.col_idx();
  const auto ava = a.values();
  std::vector<std::size_t> rp(n + 1);
  std::vector<Index> ci(a.nnz() + n);
  Vector va(a.nnz() + n);
  std::size_t out = 0;
  for (Index r = 0; r < n; ++r) {
    rp[r] = out;
    std::size_t k = arp[r];
    for (; k < arp[r + 1] && aci[k] < r; ++k, ++out) {
      ci[out] = aci[k];
      va[out] = -ava[k] * inv[r];
    }
    ci[out] = r;
    va[out] = 1.0;
    ++out;
    for (; k < arp[r + 1]; ++k, ++out) {
      ci[out] = aci[k];
      va[out] = -ava[k] * inv[r];
    }
  }
  rp[n] = out;
  return SparseMatrix::from_csr(n, n, std::move(rp), std::move(ci), std::move(va));
}

/// Column-stochastic transition matrix P = A D^{-1}.
inline SparseMatrix transition_matrix(const Graph& g) {
  const Vector inv = detail::inverse_degrees(g);
  return scale_cols(g.adjacency(), inv);
}

/// Subgraph induced by `keep`; vertex j of the result is `keep[j]`.
inline Graph induced_subgraph(const Graph& g, const IndexSet& keep) {
  keep.validate(g.size());
  auto cols = column_submatrix(g.adjacency(), keep).matrix;
  std::vector<std::size_t> rp(keep.size() + 1, 0);
  std::vector<Index> ci;
  Vector va;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    auto c = cols.row_cols(keep[j]);
    auto v = cols.row_values(keep[j]);
    ci.insert(ci.end(), c.begin(), c.end());
    va.insert(va.end(), v.begin(), v.end());
    rp[j + 1] = ci.size();
  }
  return Graph(SparseMatrix::from_csr(keep.size(), keep.size(), std::move(rp), std::move(ci),
                                      std::move(va)));
}

}  // namespace lsclust
