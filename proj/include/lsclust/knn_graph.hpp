#pragma once

// K-nearest-neighbor affinity graphs with self-tuning Gaussian weights
// A_ij = exp(-|x_i - x_j|^2 / (sigma_i sigma_j)), sigma_i the distance from
// x_i to its r-th nearest neighbor.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lsclust/errors.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

/// m points of dimension dim, stored row-major.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t m, std::size_t dim, std::vector<double> data)
      : m_(m), dim_(dim), data_(std::move(data)) {
    if (data_.size() != m_ * dim_) throw DimensionError("point data size != m * dim");
    for (double x : data_) {
      if (!std::isfinite(x)) throw ParameterError("point coordinates must be finite");
    }
  }

  std::size_t size() const noexcept { return m_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> point(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t m_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct KnnAffinity {
  /// Directed affinity; row i holds the K neighbors of point i.
  SparseMatrix affinity;
  /// Neighbor ids per point, nearest first.
  std::vector<std::vector<Index>> neighbors;
  Vector sigma;
  /// Points whose scale was zero (duplicates) and got floored.
  std::vector<Index> floored_scales;
};

struct KnnPreset {
  std::size_t k;
  std::size_t r;
};

inline constexpr KnnPreset kMnistPreset{15, 10};
inline constexpr KnnPreset kYaleBPreset{8, 5};
inline constexpr KnnPreset kAttPreset{5, 3};

/// Exact neighbor search; `threads` = 0 uses the hardware concurrency.
/// Neighbors are ordered by (distance, index), self excluded.
inline KnnAffinity knn_affinity(const PointCloud& x, std::size_t k, std::size_t r,
                                unsigned threads = 0) {
  const std::size_t m = x.size();
  if (m < 2) throw ParameterError("knn_affinity needs at least two points");
  if (!(1 <= r && r <= k && k < m)) throw ParameterError("knn_affinity requires 1 <= r <= K < m");

  KnnAffinity out;
  out.neighbors.assign(m, {});
  std::vector<Vector> dist2(m);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<Index> order(m - 1);
    Vector d(m);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < m; ++j) d[j] = j == i ? 0.0 : squared_distance(x.point(i), x.point(j));
      std::size_t w = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) order[w++] = j;
      }
      auto before = [&](Index a, Index b) { return d[a] != d[b] ? d[a] < d[b] : a < b; };
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                        before);
      out.neighbors[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
      dist2[i].resize(k);
      for (std::size_t q = 0; q < k; ++q) dist2[i][q] = d[out.neighbors[i][q]];
    }
  };

  unsigned nt = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, m));
  if (nt <= 1) {
    work(0, m);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (m + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(m, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  double scale = 0.0;
  for (double v : x.data()) scale = std::max(scale, std::abs(v));
  const double floor_sigma = 1e-12 * (scale > 0.0 ? scale : 1.0);

  out.sigma.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.sigma[i] = std::sqrt(dist2[i][r - 1]);
    if (!(out.sigma[i] > floor_sigma)) {
      out.sigma[i] = floor_sigma;
      out.floored_scales.push_back(i);
    }
  }

  std::vector<Triplet> t;
  t.reserve(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t q = 0; q < k; ++q) {
      const Index j = out.neighbors[i][q];
      double w = std::exp(-dist2[i][q] / (out.sigma[i] * out.sigma[j]));
      // Keep far neighbors structurally present even if the kernel underflows.
      w = std::max(w, std::numeric_limits<double>::min());
      t.push_back({i, j, w});
    }
  }
  out.affinity = SparseMatrix(m, m, std::move(t));
  return out;
}

enum class SymmetrizeMode { product, max, average };

inline SymmetrizeMode parse_symmetrize_mode(const std::string& s) {
  if (s == "product") return SymmetrizeMode::product;
  if (s == "max") return SymmetrizeMode::max;
  if (s == "average") return SymmetrizeMode::average;
  throw ParameterError("unknown symmetrization mode '" + s + "'");
}

/// Symmetric non-negative matrix with empty diagonal: A^T A (product), or the
/// elementwise max or mean of A and A^T. The upper triangle is computed and
/// mirrored so the result is exactly symmetric.
inline SparseMatrix symmetrize(const SparseMatrix& a, SymmetrizeMode mode) {
  if (a.rows() != a.cols()) throw DimensionError("symmetrize needs a square matrix");
  SparseMatrix full;
  switch (mode) {
    case SymmetrizeMode::product:
      full = multiply(transpose(a), a);
      break;
    case SymmetrizeMode::average:
      full = add(a, transpose(a), 0.5, 0.5);
      break;
    case SymmetrizeMode::max: {
      const SparseMatrix at = transpose(a);
      auto t = add(a, at).triplets();
      for (auto& e : t) e.value = std::max(a.at(e.row, e.col), at.at(e.row, e.col));
      full = SparseMatrix(a.rows(), a.cols(), std::move(t));
      break;
    }
  }
  std::vector<Triplet> t;
  t.reserve(full.nnz());
  for (const auto& e : full.triplets()) {
    if (e.col > e.row) {
      t.push_back(e);
      t.push_back({e.col, e.row, e.value});
    }
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(t));
}

/// Graph from point data: affinity, symmetrization, validation.
inline Graph knn_graph(const PointCloud& x, std::size_t k, std::size_t r, SymmetrizeMode mode,
                       unsigned threads = 0) {
  return Graph(symmetrize(knn_affinity(x, k, r, threads).affinity, mode));
}

}  // namespace lsclust
