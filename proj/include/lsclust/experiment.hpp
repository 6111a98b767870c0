#pragma once

// Seeded Monte-Carlo experiments on symmetric block models: accuracy sweeps
// over graph sizes and runtime-scaling benchmarks.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lsclust/clustering.hpp"
#include "lsclust/io.hpp"
#include "lsclust/metrics.hpp"
#include "lsclust/models.hpp"
#include "lsclust/rng.hpp"

namespace lsclust {

enum class ExperimentMode { lsc, ilsc };

struct SweepConfig {
  std::vector<std::size_t> ns{600, 1200, 1800, 2400, 3000};
  std::size_t k = 3;
  /// p = p_scale * ln(n) / n and q = q_scale * ln(n) / n.
  double p_scale = 8.0;
  double q_scale = 1.0;
  std::size_t trials = 500;
  /// Seeds per cluster; used when seeds_frac is zero.
  std::size_t seeds_per_cluster = 3;
  /// Fraction of each block sampled as seeds (at least one).
  double seeds_frac = 0.0;
  ExperimentMode mode = ExperimentMode::lsc;
  /// n_hat is set per trial to the true block size.
  ExtractionParams params;
  RemainderPolicy remainder = RemainderPolicy::unassigned;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;
};

struct TrialRow {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t graph_seed = 0;
  double jaccard = std::numeric_limits<double>::quiet_NaN();
  double f1 = std::numeric_limits<double>::quiet_NaN();
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double sym_diff_ratio = std::numeric_limits<double>::quiet_NaN();
  double time_ms = std::numeric_limits<double>::quiet_NaN();
  std::string error;

  bool ok() const { return error.empty(); }
};

struct Aggregate {
  std::size_t n = 0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_jaccard = 0.0, std_jaccard = 0.0;
  double mean_f1 = 0.0, std_f1 = 0.0;
  double mean_accuracy = 0.0, std_accuracy = 0.0;
  double mean_sym_diff = 0.0, std_sym_diff = 0.0;
  double mean_time_ms = 0.0, std_time_ms = 0.0;
};

struct SweepResult {
  std::vector<TrialRow> rows;
  std::vector<Aggregate> aggregates;
};

inline double ssbm_p(double scale, std::size_t n) {
  return std::min(1.0, scale * std::log(static_cast<double>(n)) / static_cast<double>(n));
}

/// Seeds drawn uniformly without replacement from each block.
inline std::vector<IndexSet> sample_seed_sets(const GroundTruth& truth, std::size_t per_cluster,
                                              double frac, Rng& rng) {
  std::vector<IndexSet> out;
  for (std::size_t b = 0; b < truth.block_count(); ++b) {
    const IndexSet block = truth.block(b);
    std::size_t count = per_cluster;
    if (frac > 0.0) {
      count = std::max<std::size_t>(1, static_cast<std::size_t>(
                                           std::round(frac * static_cast<double>(block.size()))));
    }
    out.emplace_back(rng.sample(block.ids(), count));
  }
  return out;
}

inline TrialRow run_trial(const SweepConfig& cfg, std::size_t n, std::size_t trial) {
  TrialRow row;
  row.n = n;
  row.trial = trial;
  row.graph_seed = derive_seed(cfg.master_seed, {n, trial, 0});
  try {
    const auto lg = ssbm(n, cfg.k, ssbm_p(cfg.p_scale, n), ssbm_p(cfg.q_scale, n), row.graph_seed);
    Rng rng(cfg.master_seed, {n, trial, 1});
    const auto seeds = sample_seed_sets(lg.truth, cfg.seeds_per_cluster, cfg.seeds_frac, rng);
    ExtractionParams params = cfg.params;

    using clock = std::chrono::steady_clock;
    EvalReport report;
    if (cfg.mode == ExperimentMode::lsc) {
      const IndexSet target = lg.truth.block(0);
      params.rw.n_hat = target.size();
      const auto t0 = clock::now();
      const auto res = lsc(lg.graph, seeds[0], params);
      const auto t1 = clock::now();
      row.time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      report = evaluate_extraction(res.cluster, target, n);
    } else {
      std::vector<std::size_t> n_hats;
      for (std::size_t b = 0; b < seeds.size(); ++b) n_hats.push_back(lg.truth.block(b).size());
      const auto t0 = clock::now();
      const auto lab = ilsc(lg.graph, seeds, n_hats, params, cfg.remainder);
      const auto t1 = clock::now();
      row.time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      report = evaluate_labeling(lab, seeds, lg.truth);
    }
    row.jaccard = report.jaccard;
    row.f1 = report.f1;
    row.accuracy = report.accuracy.value_or(std::numeric_limits<double>::quiet_NaN());
    row.sym_diff_ratio = report.sym_diff_ratio;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

namespace detail {

inline void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

/// Aggregates per n, in the order of first appearance. Failed rows are counted
/// but excluded from the statistics.
inline std::vector<Aggregate> aggregate(const std::vector<TrialRow>& rows) {
  std::vector<Aggregate> out;
  std::vector<std::size_t> order;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.n) == order.end()) order.push_back(r.n);
  }
  for (std::size_t n : order) {
    Aggregate a;
    a.n = n;
    std::vector<double> jac, f, acc, sd, tm;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      if (!r.ok()) {
        ++a.failures;
        continue;
      }
      ++a.count;
      jac.push_back(r.jaccard);
      f.push_back(r.f1);
      if (!std::isnan(r.accuracy)) acc.push_back(r.accuracy);
      sd.push_back(r.sym_diff_ratio);
      tm.push_back(r.time_ms);
    }
    detail::mean_std(jac, a.mean_jaccard, a.std_jaccard);
    detail::mean_std(f, a.mean_f1, a.std_f1);
    detail::mean_std(acc, a.mean_accuracy, a.std_accuracy);
    detail::mean_std(sd, a.mean_sym_diff, a.std_sym_diff);
    detail::mean_std(tm, a.mean_time_ms, a.std_time_ms);
    out.push_back(a);
  }
  return out;
}

/// Runs every (n, trial) cell. Cells may run on several threads; each derives
/// its own streams from the master seed and rows are stored in grid order.
inline SweepResult run_experiment(const SweepConfig& cfg) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t n : cfg.ns) {
    for (std::size_t t = 0; t < cfg.trials; ++t) cells.emplace_back(n, t);
  }
  SweepResult out;
  out.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      out.rows[i] = run_trial(cfg, cells[i].first, cells[i].second);
    }
  };
  const unsigned nt = std::max(1u, cfg.threads);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
  }
  out.aggregates = aggregate(out.rows);
  return out;
}

inline constexpr const char* kSweepCsvHeader = "n,trial,jaccard,f1,accuracy,sym_diff_ratio,time_ms";

/// Per-trial rows followed by "mean" and "stddev" rows for each n.
inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  using io::format_double;
  auto num = [](double x) { return std::isnan(x) ? std::string("nan") : format_double(x); };
  out << kSweepCsvHeader << '\n';
  for (const auto& row : r.rows) {
    out << row.n << ',' << row.trial << ',' << num(row.jaccard) << ',' << num(row.f1) << ','
        << num(row.accuracy) << ',' << num(row.sym_diff_ratio) << ',' << num(row.time_ms) << '\n';
  }
  for (const auto& a : r.aggregates) {
    out << a.n << ",mean," << num(a.mean_jaccard) << ',' << num(a.mean_f1) << ','
        << num(a.mean_accuracy) << ',' << num(a.mean_sym_diff) << ',' << num(a.mean_time_ms)
        << '\n';
    out << a.n << ",stddev," << num(a.std_jaccard) << ',' << num(a.std_f1) << ','
        << num(a.std_accuracy) << ',' << num(a.std_sym_diff) << ',' << num(a.std_time_ms) << '\n';
  }
}

struct BenchConfig {
  std::vector<std::size_t> ns{600, 1200, 2400, 4800, 9600};
  std::size_t k = 3;
  double p_scale = 8.0;
  double q_scale = 1.0;
  std::size_t seeds = 3;
  std::size_t repetitions = 5;
  ExtractionParams params;
  std::uint64_t master_seed = 1;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t edges = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Least squares slope of log(median time) against log(n).
  double slope = 0.0;
};

inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Times lsc alone (graph generation excluded) on one draw per n.
inline BenchResult run_bench(const BenchConfig& cfg) {
  using clock = std::chrono::steady_clock;
  BenchResult out;
  std::vector<double> xs, ys;
  for (std::size_t n : cfg.ns) {
    const auto lg = ssbm(n, cfg.k, ssbm_p(cfg.p_scale, n), ssbm_p(cfg.q_scale, n),
                         derive_seed(cfg.master_seed, {n, 0}));
    Rng rng(cfg.master_seed, {n, 1});
    const IndexSet target = lg.truth.block(0);
    const IndexSet seeds(rng.sample(target.ids(), cfg.seeds));
    ExtractionParams params = cfg.params;
    params.rw.n_hat = target.size();
    std::vector<double> times;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, cfg.repetitions); ++rep) {
      const auto t0 = clock::now();
      const auto res = lsc(lg.graph, seeds, params);
      const auto t1 = clock::now();
      if (res.cluster.empty()) throw Error("bench: empty extraction");
      times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    BenchRow row{n, lg.graph.adjacency().nnz() / 2, times[times.size() / 2], times.front()};
    out.rows.push_back(row);
    xs.push_back(static_cast<double>(n));
    ys.push_back(row.median_ms);
  }
  if (xs.size() >= 2) out.slope = loglog_slope(xs, ys);
  return out;
}

inline void write_bench_csv(std::ostream& out, const BenchResult& r) {
  out << "n,edges,median_ms,min_ms\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << row.edges << ',' << io::format_double(row.median_ms) << ','
        << io::format_double(row.min_ms) << '\n';
  }
}

}  // namespace lsclust
