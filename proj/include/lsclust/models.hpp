#pragma once

// Stochastic block models with ground truth, and the inter-connectivity
// statistics (fraction of each vertex's degree that leaves its block).

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "lsclust/errors.hpp"
#include "lsclust/rng.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

struct SbmSpec {
  std::vector<std::size_t> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t rng_seed = 0;

  std::size_t vertex_count() const {
    return std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
  }

  void validate() const {
    if (block_sizes.empty()) throw ParameterError("block model needs at least one block");
    for (auto s : block_sizes) {
      if (s == 0) throw ParameterError("block sizes must be positive");
    }
    if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0)) {
      throw ParameterError("block model requires 0 <= p_out <= p_in <= 1");
    }
  }
};

struct GroundTruth {
  std::vector<std::size_t> labels;

  std::size_t block_count() const {
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    return k;
  }

  IndexSet block(std::size_t b) const {
    std::vector<Index> ids;
    for (Index v = 0; v < labels.size(); ++v) {
      if (labels[v] == b) ids.push_back(v);
    }
    return IndexSet::from_sorted(std::move(ids));
  }
};

struct LabeledGraph {
  Graph graph;
  GroundTruth truth;
};

namespace detail {

/// Bernoulli(p) trials over positions [0, count), visited by geometric skips.
template <typename Visit>
void bernoulli_positions(Rng& rng, std::uint64_t count, double p, Visit&& visit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < count; ++i) visit(i);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t pos = 0;
  while (true) {
    const double u = rng.uniform();
    const double skip = std::floor(std::log1p(-u) / log_q);
    if (skip >= static_cast<double>(count - pos)) return;
    pos += static_cast<std::uint64_t>(skip);
    visit(pos);
    if (++pos >= count) return;
  }
}

}  // namespace detail

/// Samples an undirected simple graph: each intra-block pair is joined with
/// probability p_in, each inter-block pair with p_out. Vertices are numbered
/// block by block. Block pair (a, b) draws from its own substream
/// derive_seed(rng_seed, {a, b}), so the result depends only on the spec.
inline LabeledGraph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const std::size_t k = spec.block_sizes.size();
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t b = 0; b < k; ++b) offset[b + 1] = offset[b] + spec.block_sizes[b];
  const std::size_t n = offset[k];

  GroundTruth truth;
  truth.labels.resize(n);
  for (std::size_t b = 0; b < k; ++b) {
    for (std::size_t v = offset[b]; v < offset[b + 1]; ++v) truth.labels[v] = b;
  }

  std::vector<Graph::Edge> edges;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      Rng rng(spec.rng_seed, {a, b});
      const std::uint64_t na = spec.block_sizes[a];
      const std::uint64_t nb = spec.block_sizes[b];
      if (a == b) {
        // Pairs (i, j), i < j, flattened row by row; positions arrive in
        // increasing order so the row cursor only moves forward.
        std::uint64_t row = 0;
        std::uint64_t row_start = 0;
        detail::bernoulli_positions(rng, na * (na - 1) / 2, spec.p_in, [&](std::uint64_t pos) {
          while (pos >= row_start + (na - 1 - row)) {
            row_start += na - 1 - row;
            ++row;
          }
          const std::uint64_t col = row + 1 + (pos - row_start);
          edges.push_back({offset[a] + row, offset[a] + col, 1.0});
        });
      } else {
        detail::bernoulli_positions(rng, na * nb, spec.p_out, [&](std::uint64_t pos) {
          edges.push_back({offset[a] + pos / nb, offset[b] + pos % nb, 1.0});
        });
      }
    }
  }
  return {Graph::from_edges(n, edges), std::move(truth)};
}

/// Symmetric model: k blocks of floor(n/k), the first n mod k blocks one larger.
inline LabeledGraph ssbm(std::size_t n, std::size_t k, double p, double q, std::uint64_t seed) {
  if (k < 1 || n < k) throw ParameterError("ssbm requires 1 <= k <= n");
  SbmSpec spec;
  spec.block_sizes.assign(k, n / k);
  for (std::size_t b = 0; b < n % k; ++b) ++spec.block_sizes[b];
  spec.p_in = p;
  spec.p_out = q;
  spec.rng_seed = seed;
  return generate_sbm(spec);
}

/// Removes zero-degree vertices and compacts ids. `kept[j]` is the original
/// id of new vertex j.
struct CompactedGraph {
  LabeledGraph labeled;
  std::vector<Index> kept;
};

inline CompactedGraph drop_isolated(const LabeledGraph& in) {
  std::vector<Index> kept;
  for (Index v = 0; v < in.graph.size(); ++v) {
    if (in.graph.degree(v) > 0.0) kept.push_back(v);
  }
  CompactedGraph out;
  out.labeled.graph = induced_subgraph(in.graph, IndexSet::from_sorted(kept));
  out.labeled.truth.labels.reserve(kept.size());
  for (Index v : kept) out.labeled.truth.labels.push_back(in.truth.labels[v]);
  out.kept = std::move(kept);
  return out;
}

struct EpsilonStats {
  /// Per-vertex fraction of weighted degree going to other blocks.
  Vector eps;
  double eps_max = 0.0;
  /// Vertices with zero degree, whose epsilon is reported as 0.
  std::vector<Index> zero_degree;
};

inline EpsilonStats epsilon_stats(const Graph& g, const GroundTruth& truth) {
  if (truth.labels.size() != g.size()) throw DimensionError("labels do not cover the graph");
  EpsilonStats out;
  out.eps.assign(g.size(), 0.0);
  for (Index v = 0; v < g.size(); ++v) {
    if (!(g.degree(v) > 0.0)) {
      out.zero_degree.push_back(v);
      continue;
    }
    double outside = 0.0;
    auto cols = g.adjacency().row_cols(v);
    auto vals = g.adjacency().row_values(v);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (truth.labels[cols[k]] != truth.labels[v]) outside += vals[k];
    }
    out.eps[v] = outside / g.degree(v);
    out.eps_max = std::max(out.eps_max, out.eps[v]);
  }
  return out;
}

/// Adjacency restricted to intra-block edges.
inline SparseMatrix intra_block_adjacency(const Graph& g, const GroundTruth& truth) {
  if (truth.labels.size() != g.size()) throw DimensionError("labels do not cover the graph");
  std::vector<Triplet> t;
  for (const auto& e : g.adjacency().triplets()) {
    if (truth.labels[e.row] == truth.labels[e.col]) t.push_back(e);
  }
  return SparseMatrix(g.size(), g.size(), std::move(t));
}

struct SplitLaplacian {
  /// Random walk Laplacian of the intra-block graph.
  SparseMatrix inner;
  /// L - inner.
  SparseMatrix perturbation;
};

inline SplitLaplacian split_laplacian(const Graph& g, const GroundTruth& truth) {
  const Graph inner_graph(intra_block_adjacency(g, truth));
  SplitLaplacian out;
  out.inner = rw_laplacian(inner_graph);
  out.perturbation = add(rw_laplacian(g), out.inner, 1.0, -1.0);
  return out;
}

}  // namespace lsclust
