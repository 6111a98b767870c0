#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lsclust/models.hpp"
#include "lsclust/rng.hpp"
#include "lsclust/sparse.hpp"

namespace fixture {

inline lsclust::Graph two_triangles() {
  return lsclust::Graph::from_edges(
      6, std::vector<lsclust::Graph::Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
}

/// SSBM(n, 3, 8 ln n / n, ln n / n).
inline lsclust::LabeledGraph ssbm_family(std::size_t n, std::uint64_t seed) {
  const double nn = static_cast<double>(n);
  return lsclust::ssbm(n, 3, 8 * std::log(nn) / nn, std::log(nn) / nn, seed);
}

inline bool connected_enough(const lsclust::Graph& g) { return g.first_isolated() == g.size(); }

inline std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const lsclust::Graph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

inline lsclust::IndexSet sample_from(lsclust::Rng& rng, const lsclust::IndexSet& pool, std::size_t k) {
  return lsclust::IndexSet(rng.sample(pool.ids(), k));
}

}  // namespace fixture
