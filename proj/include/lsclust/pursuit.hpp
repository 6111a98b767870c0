#pragma once

// Least squares cluster pursuit.
//
// Given a candidate set Omega containing the target cluster, y = L 1_Omega is
// (for a disconnected target) the image of the indicator of Omega minus the
// cluster. Dropping a column set T believed to lie inside the cluster removes
// the all-ones solution, so the least squares solution on the remaining
// columns approximates the indicator of the vertices to reject.

#include <cmath>
#include <vector>

#include "lsclust/errors.hpp"
#include "lsclust/lsqr.hpp"
#include "lsclust/random_walk.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

struct PursuitParams {
  /// Fraction of Omega removed as presumed in-cluster columns.
  double gamma = 0.2;
  /// Vertices whose solution entry exceeds this value are rejected.
  double reject = 0.5;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
    if (!(reject >= 0.1 && reject <= 0.9)) {
      throw ParameterError("rejection threshold must lie in [0.1, 0.9]");
    }
  }
};

struct PursuitResult {
  IndexSet cluster;
  IndexSet removed;
  /// Columns the least squares problem was solved on (Omega minus removed).
  IndexSet solved_columns;
  /// Solution entry per solved column.
  Vector solution;
  std::size_t omega_size = 0;
  std::size_t solver_iterations = 0;
  double residual_norm = 0.0;
  bool solver_converged = true;
  /// Entries that came back NaN and were rejected.
  std::size_t nan_entries = 0;
  /// Set by lsc when a round produced an empty cluster.
  bool degenerate = false;
};

/// max(1, floor(gamma * |Omega|)), kept below |Omega| so at least one column
/// remains to solve on.
inline std::size_t removal_count(std::size_t omega_size, double gamma) {
  if (omega_size <= 1) return omega_size;
  auto t = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(omega_size) + 1e-9));
  return std::clamp<std::size_t>(t, 1, omega_size - 1);
}

/// Columns of Omega with the smallest scores |L_Omega^T| |y|.
inline IndexSet select_removal_set(const SparseMatrix& laplacian, const IndexSet& omega,
                                   std::span<const double> y, double gamma) {
  if (omega.empty()) throw EmptyOmegaError();
  if (y.size() != laplacian.rows()) throw DimensionError("select_removal_set: y length mismatch");
  const Vector all = abs_matvec_transpose(laplacian, y);
  Vector scores;
  scores.reserve(omega.size());
  for (Index j : omega) scores.push_back(all[j]);
  const auto picked = bottom_s_positions(scores, removal_count(omega.size(), gamma));
  std::vector<Index> ids;
  ids.reserve(picked.size());
  for (Index j : picked) ids.push_back(omega[j]);
  return IndexSet::from_sorted(std::move(ids));
}

/// Pursuit against a precomputed random walk Laplacian.
inline PursuitResult cluster_pursuit(const SparseMatrix& laplacian, const IndexSet& omega,
                                     const PursuitParams& params,
                                     const LsqrSettings& solver = {}) {
  if (omega.empty()) throw EmptyOmegaError();
  omega.validate(laplacian.cols());
  params.validate();

  PursuitResult out;
  out.omega_size = omega.size();
  if (omega.size() == 1) {
    out.cluster = omega;
    out.removed = omega;
    return out;
  }

  const Vector y = spmv(laplacian, indicator(omega, laplacian.cols()));
  out.removed = select_removal_set(laplacian, omega, y, params.gamma);
  out.solved_columns = set_difference(omega, out.removed);

  const auto sub = column_submatrix(laplacian, out.solved_columns);
  auto sol = lsqr(sub.matrix, y, solver);
  out.solver_iterations = sol.iterations;
  out.residual_norm = sol.residual_norm;
  out.solver_converged = sol.converged;

  std::vector<Index> rejected;
  for (std::size_t j = 0; j < sol.x.size(); ++j) {
    const double xj = sol.x[j];
    if (std::isnan(xj)) {
      ++out.nan_entries;
      rejected.push_back(out.solved_columns[j]);
    } else if (xj > params.reject) {
      rejected.push_back(out.solved_columns[j]);
    }
  }
  out.solution = std::move(sol.x);
  out.cluster = set_difference(omega, IndexSet::from_sorted(std::move(rejected)));
  return out;
}

inline PursuitResult cluster_pursuit(const Graph& g, const IndexSet& omega,
                                     const PursuitParams& params,
                                     const LsqrSettings& solver = {}) {
  if (omega.empty()) throw EmptyOmegaError();
  omega.validate(g.size());
  return cluster_pursuit(rw_laplacian(g), omega, params, solver);
}

}  // namespace lsclust
