#pragma once

// Iterative least squares (LSQR, Golub-Kahan bidiagonalization) and an
// extreme-eigenvalue estimate of M^T M used to check conditioning.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "lsclust/errors.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust {

struct LsqrSettings {
  double tol = 1e-6;
  std::size_t max_iter = 1000;
};

struct LsqrResult {
  Vector x;
  std::size_t iterations = 0;
  /// ||M x - y||_2 of the returned iterate.
  double residual_norm = 0.0;
  /// Estimate of ||M^T (M x - y)||_2.
  double normal_residual_norm = 0.0;
  bool converged = false;
};

/// Minimizes ||M x - y||_2. Stops once the normal-equation residual satisfies
/// ||M^T(Mx - y)|| <= tol * ||M^T y||. On hitting max_iter the last iterate is
/// returned with converged = false; LSQR residuals are monotone so it is also
/// the best one seen.
inline LsqrResult lsqr(const SparseMatrix& m, std::span<const double> y,
                       const LsqrSettings& settings = {}) {
  if (y.size() != m.rows()) {
    throw DimensionError("lsqr: right-hand side length " + std::to_string(y.size()) + " != " +
                         std::to_string(m.rows()) + " rows");
  }
  if (!(settings.tol > 0.0)) throw ParameterError("lsqr: tol must be positive");

  LsqrResult out;
  out.x.assign(m.cols(), 0.0);

  Vector u(y.begin(), y.end());
  double beta = norm2(u);
  out.residual_norm = beta;
  if (beta == 0.0 || m.cols() == 0) {
    out.converged = true;
    return out;
  }
  for (double& e : u) e /= beta;
  Vector v = spmv_transpose(m, u);
  double alpha = norm2(v);
  const double normal_rhs = alpha * beta;
  out.normal_residual_norm = normal_rhs;
  if (alpha == 0.0) {
    // y is orthogonal to range(M); x = 0 is optimal.
    out.converged = true;
    return out;
  }
  for (double& e : v) e /= alpha;

  Vector w = v;
  double phibar = beta;
  double rhobar = alpha;
  const double target = settings.tol * normal_rhs;

  for (std::size_t it = 1; it <= settings.max_iter; ++it) {
    // Bidiagonalization step.
    Vector mv = spmv(m, v);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = mv[i] - alpha * u[i];
    beta = norm2(u);
    if (beta > 0.0) {
      for (double& e : u) e /= beta;
      Vector mtu = spmv_transpose(m, u);
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = mtu[j] - beta * v[j];
      alpha = norm2(v);
      if (alpha > 0.0) {
        for (double& e : v) e /= alpha;
      }
    } else {
      alpha = 0.0;
    }

    // Plane rotation eliminating the subdiagonal beta.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t j = 0; j < w.size(); ++j) {
      out.x[j] += t1 * w[j];
      w[j] = v[j] + t2 * w[j];
    }

    out.iterations = it;
    out.residual_norm = phibar;
    out.normal_residual_norm = phibar * alpha * std::abs(c);
    if (out.normal_residual_norm <= target || alpha == 0.0 || beta == 0.0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x.
inline std::size_t sturm_count(std::span<const double> diag, std::span<const double> off,
                               double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    q = diag[i] - x - (i == 0 ? 0.0 : b2 / q);
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(x) + 1.0);
    if (q < 0.0) ++count;
  }
  return count;
}

/// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal by bisection.
inline double tridiag_eigenvalue(std::span<const double> diag, std::span<const double> off,
                                 std::size_t k) {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < diag.size()) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(std::abs(lo), std::abs(hi));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::uint64_t splitmix_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

struct ExtremeEigenvalues {
  double min = 0.0;
  double max = 0.0;
  std::size_t lanczos_steps = 0;
};

/// Smallest and largest eigenvalues of M^T M by Lanczos with full
/// reorthogonalization. Runs until both Ritz extremes are stable to 1e-12
/// relative over several steps, or until the Krylov space spans all columns.
inline ExtremeEigenvalues normal_extreme_eigenvalues(const SparseMatrix& m) {
  const std::size_t n = m.cols();
  if (n == 0) throw DimensionError("normal_extreme_eigenvalues: matrix has no columns");

  std::uint64_t rng = 0x5eed1e55ULL;
  auto random_vector = [&] {
    Vector q(n);
    for (double& e : q) {
      e = static_cast<double>(detail::splitmix_step(rng) >> 11) * 0x1.0p-53 - 0.5;
    }
    return q;
  };

  std::vector<Vector> basis;
  Vector diag;
  Vector off;
  ExtremeEigenvalues out;
  double prev_min = 0.0;
  double prev_max = 0.0;
  int stable = 0;

  auto orthonormalize = [&](Vector& q) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(q, b);
        for (std::size_t i = 0; i < n; ++i) q[i] -= c * b[i];
      }
    }
    return norm2(q);
  };

  Vector q = random_vector();
  double nq = norm2(q);
  for (double& e : q) e /= nq;

  double scale = 0.0;
  while (basis.size() < n) {
    basis.push_back(q);
    Vector w = spmv_transpose(m, spmv(m, q));
    const double a = dot(w, q);
    diag.push_back(a);
    scale = std::max(scale, std::abs(a));
    double b = orthonormalize(w);

    out.min = detail::tridiag_eigenvalue(diag, off, 0);
    out.max = detail::tridiag_eigenvalue(diag, off, diag.size() - 1);
    out.lanczos_steps = basis.size();
    if (basis.size() > 1) {
      const double dmin = std::abs(out.min - prev_min);
      const double dmax = std::abs(out.max - prev_max);
      if (dmin <= 1e-12 * out.max && dmax <= 1e-12 * out.max) {
        ++stable;
      } else {
        stable = 0;
      }
      if (stable >= 8) break;
    }
    prev_min = out.min;
    prev_max = out.max;
    if (basis.size() == n) break;

    if (b <= 1e-10 * std::max(scale, 1e-300)) {
      // Invariant subspace found; continue in a fresh orthogonal direction.
      w = random_vector();
      b = orthonormalize(w);
      if (b == 0.0) break;
      for (double& e : w) e /= b;
      off.push_back(0.0);
    } else {
      for (double& e : w) e /= b;
      off.push_back(b);
    }
    q = std::move(w);
  }
  return out;
}

/// Condition number lambda_max / lambda_min of M^T M.
inline double cond_normal(const SparseMatrix& m) {
  const auto ev = normal_extreme_eigenvalues(m);
  if (!(ev.max > 0.0) || ev.min < 1e-12 * ev.max) {
    throw RankDeficientError("cond_normal: matrix is numerically rank deficient");
  }
  return ev.max / ev.min;
}

}  // namespace lsclust
