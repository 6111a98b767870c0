// Label every vertex of a block model from a handful of seeds per block.

#include <cstdio>

#include "lsclust/lsclust.hpp"

int main() {
  using namespace lsclust;
  const auto lg = generate_sbm({{300, 400, 500}, 0.08, 0.005, 7});
  Rng rng(7, {1});
  const auto seeds = sample_seed_sets(lg.truth, 0, 0.02, rng);

  ExtractionParams params;
  params.pursuit.reject = 0.5;
  const auto labels = ilsc(lg.graph, seeds, {300, 400, 500}, params, RemainderPolicy::nearest_seed_walk);

  const auto report = evaluate_labeling(labels, seeds, lg.truth);
  for (std::size_t c = 0; c < labels.clusters.size(); ++c) {
    std::printf("cluster %zu: %zu vertices, jaccard %.4f\n", c, labels.clusters[c].size(),
                report.per_cluster[c].jaccard);
  }
  std::printf("accuracy %.4f\n", *report.accuracy);
}
