#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lsclust/clustering.hpp"
#include "lsclust/errors.hpp"
#include "lsclust/models.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

/// |pred ∩ truth| / |pred ∪ truth|; 1 when both are empty.
inline double jaccard(const IndexSet& pred, const IndexSet& truth) {
  const std::size_t inter = set_intersection(pred, truth).size();
  const std::size_t uni = pred.size() + truth.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct F1Score {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

inline F1Score f1(const IndexSet& pred, const IndexSet& truth) {
  if (truth.empty()) throw UndefinedMetricError("f1: truth set is empty");
  const auto inter = static_cast<double>(set_intersection(pred, truth).size());
  F1Score s;
  s.precision = pred.empty() ? 0.0 : inter / static_cast<double>(pred.size());
  s.recall = inter / static_cast<double>(truth.size());
  const double pr = s.precision + s.recall;
  s.f1 = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;
  return s;
}

/// |pred △ truth| / |truth|. Not symmetric in its arguments.
inline double sym_diff_ratio(const IndexSet& pred, const IndexSet& truth) {
  if (truth.empty()) throw UndefinedMetricError("sym_diff_ratio: truth set is empty");
  return static_cast<double>(set_symmetric_difference(pred, truth).size()) /
         static_cast<double>(truth.size());
}

struct SetReport {
  double jaccard = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double sym_diff_ratio = 0.0;
};

inline SetReport evaluate_set(const IndexSet& pred, const IndexSet& truth) {
  const auto s = f1(pred, truth);
  return {jaccard(pred, truth), s.f1, s.precision, s.recall, sym_diff_ratio(pred, truth)};
}

struct EvalReport {
  double jaccard = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double sym_diff_ratio = 0.0;
  std::optional<double> accuracy;
  std::size_t misclassified_count = 0;
  std::vector<SetReport> per_cluster;
};

/// True block of every seed set. Throws if a seed set spans several blocks.
inline std::vector<std::size_t> seed_identities(const std::vector<IndexSet>& seed_sets,
                                                const GroundTruth& truth) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < seed_sets.size(); ++i) {
    if (seed_sets[i].empty()) throw EmptySeedError("seed set " + std::to_string(i) + " is empty");
    seed_sets[i].validate(truth.labels.size());
    const std::size_t label = truth.labels[seed_sets[i][0]];
    for (Index s : seed_sets[i]) {
      if (truth.labels[s] != label) {
        throw AmbiguousIdentityError("seed set " + std::to_string(i) +
                                     " spans several true blocks");
      }
    }
    ids.push_back(label);
  }
  return ids;
}

struct AccuracyResult {
  double accuracy = 0.0;
  std::size_t misclassified = 0;
};

/// Fraction of vertices whose cluster's seed-given identity equals their true
/// label. Unassigned vertices count as misclassified.
inline AccuracyResult accuracy(const ClusterLabeling& labeling,
                               const std::vector<std::size_t>& cluster_identity,
                               const GroundTruth& truth) {
  if (labeling.assignments.size() != truth.labels.size()) {
    throw DimensionError("accuracy: labeling and truth sizes differ");
  }
  const std::size_t n = truth.labels.size();
  if (n == 0) throw UndefinedMetricError("accuracy: empty vertex set");
  std::size_t correct = 0;
  for (Index v = 0; v < n; ++v) {
    const auto a = labeling.assignments[v];
    if (a == ClusterLabeling::kUnassigned) continue;
    const auto c = static_cast<std::size_t>(a);
    if (c >= cluster_identity.size()) throw IndexError("accuracy: cluster id without identity");
    correct += cluster_identity[c] == truth.labels[v];
  }
  return {static_cast<double>(correct) / static_cast<double>(n), n - correct};
}

inline AccuracyResult accuracy(const ClusterLabeling& labeling,
                               const std::vector<IndexSet>& seed_sets, const GroundTruth& truth) {
  return accuracy(labeling, seed_identities(seed_sets, truth), truth);
}

/// Per-cluster set metrics against the seed-identified blocks, macro averaged,
/// plus accuracy. With `micro`, jaccard/f1 are pooled over all clusters.
inline EvalReport evaluate_labeling(const ClusterLabeling& labeling,
                                    const std::vector<IndexSet>& seed_sets,
                                    const GroundTruth& truth, bool micro = false) {
  const auto identity = seed_identities(seed_sets, truth);
  EvalReport r;
  std::size_t inter = 0, pred_total = 0, truth_total = 0, symdiff = 0;
  for (std::size_t i = 0; i < labeling.clusters.size(); ++i) {
    const IndexSet block = truth.block(identity[i]);
    r.per_cluster.push_back(evaluate_set(labeling.clusters[i], block));
    inter += set_intersection(labeling.clusters[i], block).size();
    pred_total += labeling.clusters[i].size();
    truth_total += block.size();
    symdiff += set_symmetric_difference(labeling.clusters[i], block).size();
  }
  const auto k = static_cast<double>(r.per_cluster.size());
  if (micro) {
    const double p = pred_total ? static_cast<double>(inter) / static_cast<double>(pred_total) : 0.0;
    const double rc = truth_total ? static_cast<double>(inter) / static_cast<double>(truth_total) : 0.0;
    r.precision = p;
    r.recall = rc;
    r.f1 = p + rc > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
    const std::size_t uni = pred_total + truth_total - inter;
    r.jaccard = uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
    r.sym_diff_ratio = truth_total ? static_cast<double>(symdiff) / static_cast<double>(truth_total) : 0.0;
  } else if (k > 0) {
    for (const auto& c : r.per_cluster) {
      r.jaccard += c.jaccard / k;
      r.f1 += c.f1 / k;
      r.precision += c.precision / k;
      r.recall += c.recall / k;
      r.sym_diff_ratio += c.sym_diff_ratio / k;
    }
  }
  const auto acc = accuracy(labeling, identity, truth);
  r.accuracy = acc.accuracy;
  r.misclassified_count = acc.misclassified;
  return r;
}

/// Metrics of a single extracted cluster against one true block. Accuracy is
/// the in/out classification accuracy over all n vertices.
inline EvalReport evaluate_extraction(const IndexSet& pred, const IndexSet& truth, std::size_t n) {
  const auto s = evaluate_set(pred, truth);
  EvalReport r{s.jaccard, s.f1, s.precision, s.recall, s.sym_diff_ratio, std::nullopt, 0, {}};
  r.misclassified_count = set_symmetric_difference(pred, truth).size();
  if (n > 0) {
    r.accuracy = 1.0 - static_cast<double>(r.misclassified_count) / static_cast<double>(n);
  }
  return r;
}

}  // namespace lsclust
