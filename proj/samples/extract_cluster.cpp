// Pull one planted cluster out of a noisy block model from three seeds.

#include <cstdio>

#include "lsclust/lsclust.hpp"

int main() {
  using namespace lsclust;
  const std::size_t n = 1200;
  const auto lg = ssbm(n, 3, ssbm_p(8.0, n), ssbm_p(1.0, n), 2024);
  const IndexSet target = lg.truth.block(0);

  ExtractionParams params;
  params.rw.n_hat = target.size();
  params.pursuit.reject = 0.5;
  params.max_iter = 2;

  const IndexSet seeds{target[0], target[1], target[2]};
  const auto res = lsc(lg.graph, seeds, params);
  const auto eval = evaluate_extraction(res.cluster, target, n);
  std::printf("candidate set %zu, cluster %zu of %zu, jaccard %.4f, %zu lsqr iterations\n",
              res.omega_size, res.cluster.size(), target.size(), eval.jaccard, res.solver_iterations);
}
