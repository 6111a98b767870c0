#pragma once

// Local cluster extraction (alternating random-walk thresholding and least
// squares pursuit) and its iterated form that peels clusters off one at a time.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lsclust/errors.hpp"
#include "lsclust/pursuit.hpp"
#include "lsclust/random_walk.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

struct ExtractionParams {
  RandomWalkParams rw;
  PursuitParams pursuit;
  std::size_t max_iter = 1;
  LsqrSettings solver;

  void validate(Index n) const {
    rw.validate(n);
    pursuit.validate();
    if (max_iter < 1) throw ParameterError("max_iter must be at least 1");
  }
};

/// Extracts the cluster containing `seeds`. Each round replaces the seed set
/// with the previous round's output; n_hat stays fixed.
inline PursuitResult lsc(const Graph& g, const IndexSet& seeds, const ExtractionParams& params) {
  if (seeds.empty()) throw EmptySeedError();
  seeds.validate(g.size());
  params.validate(g.size());

  const SparseMatrix transition = transition_matrix(g);
  const SparseMatrix laplacian = rw_laplacian(g);

  IndexSet gamma = seeds;
  std::optional<PursuitResult> last;
  for (std::size_t round = 0; round < params.max_iter; ++round) {
    const IndexSet omega = random_walk_threshold(transition, g.degrees(), gamma, params.rw);
    PursuitResult res = cluster_pursuit(laplacian, omega, params.pursuit, params.solver);
    if (res.cluster.empty()) {
      if (!last) {
        res.degenerate = true;
        return res;
      }
      last->degenerate = true;
      return *last;
    }
    gamma = res.cluster;
    last = std::move(res);
  }
  return *last;
}

enum class RemainderPolicy {
  /// Leftover vertices keep the unassigned label.
  unassigned,
  /// Leftover vertices join the last cluster.
  last,
  /// Leftover vertices join the cluster whose seeds send them the most
  /// diffusion mass (normalized per seed set) on the original graph.
  nearest_seed_walk,
};

struct ClusterLabeling {
  static constexpr std::int64_t kUnassigned = -1;

  /// Per-vertex cluster index, or kUnassigned.
  std::vector<std::int64_t> assignments;
  /// Cluster i was grown from seed set i.
  std::vector<IndexSet> clusters;
  /// Per-cluster pursuit diagnostics, in residual-graph terms.
  std::vector<PursuitResult> diagnostics;
  std::vector<std::string> warnings;

  std::size_t unassigned_count() const {
    std::size_t c = 0;
    for (auto a : assignments) c += a == kUnassigned;
    return c;
  }
};

namespace detail {

inline void assign_remainder(const Graph& g, const std::vector<IndexSet>& seed_sets,
                             std::size_t depth, RemainderPolicy policy, ClusterLabeling& out) {
  if (policy == RemainderPolicy::unassigned || out.clusters.empty()) return;
  std::vector<Index> leftover;
  for (Index v = 0; v < g.size(); ++v) {
    if (out.assignments[v] == ClusterLabeling::kUnassigned) leftover.push_back(v);
  }
  if (leftover.empty()) return;

  if (policy == RemainderPolicy::last) {
    const auto k = static_cast<std::int64_t>(out.clusters.size() - 1);
    for (Index v : leftover) out.assignments[v] = k;
  } else {
    // Vertices of zero degree get no mass and stay unassigned.
    Vector deg_safe(g.degrees().begin(), g.degrees().end());
    for (double& d : deg_safe) {
      if (d <= 0.0) d = 1.0;
    }
    const SparseMatrix transition = scale_cols(g.adjacency(), [&] {
      Vector inv(deg_safe.size());
      for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / deg_safe[i];
      return inv;
    }());
    std::vector<Vector> mass;
    for (const auto& s : seed_sets) {
      Vector v = diffuse(transition, g.degrees(), s, depth);
      const double total = norm1(v);
      if (total > 0.0) {
        for (double& e : v) e /= total;
      }
      mass.push_back(std::move(v));
    }
    for (Index v : leftover) {
      double best = 0.0;
      std::int64_t arg = ClusterLabeling::kUnassigned;
      for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i][v] > best) {
          best = mass[i][v];
          arg = static_cast<std::int64_t>(i);
        }
      }
      out.assignments[v] = arg;
    }
  }
  for (auto& c : out.clusters) c = IndexSet();
  std::vector<std::vector<Index>> members(out.clusters.size());
  for (Index v = 0; v < g.size(); ++v) {
    if (out.assignments[v] >= 0) members[static_cast<std::size_t>(out.assignments[v])].push_back(v);
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    out.clusters[i] = IndexSet::from_sorted(std::move(members[i]));
  }
}

}  // namespace detail

/// Extracts k clusters in seed-set order. After each extraction the cluster's
/// vertices and incident edges are deleted; vertices left with no edges are
/// excluded from later rounds. Clusters are reported in original vertex ids.
inline ClusterLabeling ilsc(const Graph& g, const std::vector<IndexSet>& seed_sets,
                            const std::vector<std::size_t>& n_hats, const ExtractionParams& params,
                            RemainderPolicy remainder = RemainderPolicy::unassigned) {
  if (seed_sets.empty()) throw ParameterError("ilsc needs at least one seed set");
  if (n_hats.size() != seed_sets.size()) {
    throw DimensionError("ilsc: one n_hat per seed set is required");
  }
  {
    std::vector<char> seen(g.size(), 0);
    for (std::size_t i = 0; i < seed_sets.size(); ++i) {
      if (seed_sets[i].empty()) throw EmptySeedError("seed set " + std::to_string(i) + " is empty");
      seed_sets[i].validate(g.size());
      for (Index s : seed_sets[i]) {
        if (seen[s]) throw ParameterError("seed sets overlap at vertex " + std::to_string(s));
        seen[s] = 1;
      }
    }
  }

  ClusterLabeling out;
  out.assignments.assign(g.size(), ClusterLabeling::kUnassigned);
  std::vector<char> removed(g.size(), 0);

  for (std::size_t i = 0; i < seed_sets.size(); ++i) {
    // Residual graph: unextracted vertices that still have an unextracted neighbor.
    std::vector<Index> alive;
    for (Index v = 0; v < g.size(); ++v) {
      if (removed[v]) continue;
      bool has_edge = false;
      for (Index u : g.adjacency().row_cols(v)) {
        if (!removed[u]) {
          has_edge = true;
          break;
        }
      }
      if (has_edge) alive.push_back(v);
    }
    const IndexSet alive_set = IndexSet::from_sorted(alive);
    constexpr Index kAbsent = std::numeric_limits<Index>::max();
    std::vector<Index> to_local(g.size(), kAbsent);
    for (std::size_t j = 0; j < alive.size(); ++j) to_local[alive[j]] = j;

    std::vector<Index> local_seeds;
    for (Index s : seed_sets[i]) {
      if (to_local[s] == kAbsent) {
        out.warnings.push_back("cluster " + std::to_string(i) + ": seed " + std::to_string(s) +
                               (removed[s] ? " was extracted earlier" : " became isolated") +
                               " and was dropped");
      } else {
        local_seeds.push_back(to_local[s]);
      }
    }
    if (local_seeds.empty()) throw SeedConsumedError(i);

    const Graph residual = induced_subgraph(g, alive_set);
    ExtractionParams local = params;
    local.rw.n_hat = std::clamp<std::size_t>(n_hats[i], 1, residual.size());
    PursuitResult res = lsc(residual, IndexSet::from_sorted(std::move(local_seeds)), local);

    std::vector<Index> members;
    members.reserve(res.cluster.size());
    for (Index j : res.cluster) members.push_back(alive[j]);
    for (Index v : members) {
      removed[v] = 1;
      out.assignments[v] = static_cast<std::int64_t>(i);
    }
    out.clusters.push_back(IndexSet::from_sorted(std::move(members)));
    out.diagnostics.push_back(std::move(res));
  }

  detail::assign_remainder(g, seed_sets, params.rw.depth, remainder, out);
  return out;
}

}  // namespace lsclust
