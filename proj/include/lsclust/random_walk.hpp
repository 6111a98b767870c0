#pragma once

// Seeded diffusion and top-s thresholding: produces a candidate superset of
// the target cluster from a few seed vertices.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "lsclust/errors.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

struct RandomWalkParams {
  /// Oversampling factor: the threshold keeps round((1 + delta) * n_hat) vertices.
  double delta = 0.6;
  /// Number of diffusion steps.
  std::size_t depth = 3;
  /// Estimated size of the target cluster.
  std::size_t n_hat = 1;

  void validate(Index n) const {
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    if (depth < 1) throw ParameterError("random walk depth must be at least 1");
    if (n_hat < 1 || n_hat > n) {
      throw ParameterError("n_hat must lie in [1, " + std::to_string(n) + "]");
    }
  }

  /// Threshold size, clamped to [1, n].
  std::size_t threshold_size(Index n) const {
    const double s = std::round((1.0 + delta) * static_cast<double>(n_hat));
    return std::clamp<std::size_t>(static_cast<std::size_t>(s), 1, std::max<Index>(n, 1));
  }
};

/// Indices of the `s` largest entries of v. Ties go to the smaller index.
inline IndexSet top_s(std::span<const double> v, std::size_t s) {
  s = std::min(s, v.size());
  std::vector<Index> order(v.size());
  std::iota(order.begin(), order.end(), Index{0});
  auto before = [&](Index a, Index b) { return v[a] != v[b] ? v[a] > v[b] : a < b; };
  if (s < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                     before);
  }
  order.resize(s);
  return IndexSet(std::move(order));
}

/// Indices of the `s` smallest entries of v. Ties go to the smaller index.
inline std::vector<Index> bottom_s_positions(std::span<const double> v, std::size_t s) {
  s = std::min(s, v.size());
  std::vector<Index> order(v.size());
  std::iota(order.begin(), order.end(), Index{0});
  auto before = [&](Index a, Index b) { return v[a] != v[b] ? v[a] < v[b] : a < b; };
  if (s < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                     before);
  }
  order.resize(s);
  std::sort(order.begin(), order.end());
  return order;
}

/// v^(t) = P^t D 1_seeds, computed with `depth` sparse products.
inline Vector diffuse(const SparseMatrix& transition, std::span<const double> degrees,
                      const IndexSet& seeds, std::size_t depth) {
  const Index n = transition.rows();
  seeds.validate(n);
  Vector v(n, 0.0);
  for (Index s : seeds) v[s] = degrees[s];
  for (std::size_t step = 0; step < depth; ++step) v = spmv(transition, v);
  return v;
}

inline Vector diffuse(const Graph& g, const IndexSet& seeds, std::size_t depth) {
  return diffuse(transition_matrix(g), g.degrees(), seeds, depth);
}

/// Candidate set top_s(P^t D 1_seeds) united with the seeds, using a
/// precomputed transition matrix.
inline IndexSet random_walk_threshold(const SparseMatrix& transition,
                                      std::span<const double> degrees, const IndexSet& seeds,
                                      const RandomWalkParams& params) {
  if (seeds.empty()) throw EmptySeedError();
  const Index n = transition.rows();
  params.validate(n);
  const Vector v = diffuse(transition, degrees, seeds, params.depth);
  return set_union(top_s(v, params.threshold_size(n)), seeds);
}

inline IndexSet random_walk_threshold(const Graph& g, const IndexSet& seeds,
                                      const RandomWalkParams& params) {
  if (seeds.empty()) throw EmptySeedError();
  seeds.validate(g.size());
  return random_walk_threshold(transition_matrix(g), g.degrees(), seeds, params);
}

}  // namespace lsclust
