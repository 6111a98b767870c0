// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// required criterion fails.

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "lsclust/lsclust.hpp"
#include "oracles.hpp"

using namespace lsclust;

namespace {

// Mean Jaccard of the straight-line oracle (R = 0.5, two rounds, 200 trials
// per size), measured by the acceptance_pilot target.
constexpr double kPilotMean600 = 0.9919;
constexpr double kPilotMean1200 = 0.9944;
constexpr double kPilotMean1800 = 0.9954;
constexpr double kPilotSlack = 0.03;

constexpr double kCondBound = 5.0;
constexpr double kPerturbationSlack = 1e-8;
constexpr double kSolverRelTol = 1e-8;
constexpr double kSlopeBound = 1.35;
constexpr double kMnistAccuracy = 0.970;

struct Outcome {
  enum Status { pass, fail, skip } status;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = body();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status == Outcome::pass && s >= limit_s) {
    o.status = Outcome::fail;
    o.detail += "; over time limit";
  }
  const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
  if (o.status == Outcome::fail) ++failures;
  std::printf("[%s] %d %s: %s (%.1f s, limit %.0f s)\n", tag, id, name, o.detail.c_str(), s, limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExtractionParams defaults(std::size_t n_hat, std::size_t max_iter = 1) {
  ExtractionParams p;
  p.rw = {0.6, 3, n_hat};
  p.pursuit = {0.2, 0.5};
  p.max_iter = max_iter;
  return p;
}

Outcome exact_recovery() {
  int exact = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const double ln = std::log(600.0);
    const auto lg = ssbm(600, 3, 8 * ln / 600, 0.0, derive_seed(101, {trial, 0}));
    Rng rng(101, {trial, 1});
    const IndexSet c1 = lg.truth.block(0);
    const auto r = lsc(lg.graph, fixture::sample_from(rng, c1, 3), defaults(c1.size()));
    exact += jaccard(r.cluster, c1) == 1.0;
  }
  return {exact == 100 ? Outcome::pass : Outcome::fail, fmt("Jaccard = 1 in %d/100 trials", exact)};
}

Outcome accuracy_sweep() {
  SweepConfig cfg;
  cfg.ns = {600, 1200, 1800};
  cfg.trials = 500;
  cfg.seeds_per_cluster = 3;
  cfg.params = defaults(1, 2);
  cfg.master_seed = 7;
  const auto res = run_experiment(cfg);
  const double floors[] = {kPilotMean600 - kPilotSlack, kPilotMean1200 - kPilotSlack,
                           kPilotMean1800 - kPilotSlack};
  bool ok = true;
  std::string detail = "mean Jaccard";
  double prev = -1.0;
  for (std::size_t i = 0; i < res.aggregates.size(); ++i) {
    const auto& a = res.aggregates[i];
    detail += fmt(" n=%zu:%.4f (floor %.4f, %zu failed)", a.n, a.mean_jaccard, floors[i], a.failures);
    ok = ok && a.failures == 0 && a.mean_jaccard >= floors[i] && a.mean_jaccard >= prev;
    prev = a.mean_jaccard;
  }
  return {ok ? Outcome::pass : Outcome::fail, detail};
}

Outcome conditioning() {
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const double ln = std::log(600.0);
    const auto lg = ssbm(600, 3, 8 * ln / 600, 0.0, derive_seed(303, {trial, 0}));
    Rng rng(303, {trial, 1});
    const IndexSet c1 = lg.truth.block(0);
    const std::size_t n1 = c1.size();
    const IndexSet t = fixture::sample_from(rng, c1, (3 * n1 + 3) / 4);
    const IndexSet outside = fixture::sample_from(rng, set_difference(IndexSet::range(600), c1), (n1 + 1) / 2);
    const IndexSet omega = set_union(c1, outside);
    const auto split = split_laplacian(lg.graph, lg.truth);
    double c = INFINITY;
    try {
      c = cond_normal(column_submatrix(split.inner, set_difference(omega, t)).matrix);
    } catch (const RankDeficientError&) {
    }
    worst = std::max(worst, c);
    good += c <= kCondBound;
  }
  return {good >= 95 ? Outcome::pass : Outcome::fail,
          fmt("cond <= %.0f in %d/100 draws, worst %.4f", kCondBound, good, worst)};
}

Outcome perturbation_bound() {
  int good = 0;
  double worst_gap = -INFINITY;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto lg = ssbm(300, 3, 0.2, 0.02, derive_seed(404, {seed}));
    const auto split = split_laplacian(lg.graph, lg.truth);
    const oracle::Dense m = oracle::to_dense(split.perturbation);
    Eigen::SelfAdjointEigenSolver<oracle::Dense> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    const double norm = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    const double bound = 2 * epsilon_stats(lg.graph, lg.truth).eps_max;
    worst_gap = std::max(worst_gap, norm - bound);
    good += norm <= bound + kPerturbationSlack;
  }
  return {good == 100 ? Outcome::pass : Outcome::fail,
          fmt("||M|| <= 2 eps_max in %d/100 draws, largest ||M|| - 2 eps_max = %.4f", good, worst_gap)};
}

Outcome containment() {
  int contained = 0;
  double eps_sum = 0.0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const auto lg = fixture::ssbm_family(600, derive_seed(505, {trial, 0}));
    Rng rng(505, {trial, 1});
    const IndexSet c1 = lg.truth.block(0);
    const auto omega = random_walk_threshold(lg.graph, fixture::sample_from(rng, c1, 3), {0.6, 3, c1.size()});
    contained += c1.is_subset_of(omega);
    eps_sum += epsilon_stats(lg.graph, lg.truth).eps_max;
  }
  const bool ok = contained >= 190;
  std::string detail = fmt("C1 in Omega in %d/200 trials (need 190), mean eps_max %.3f", contained, eps_sum / 200);
  if (!ok) {
    detail +=
        "; raw diffusion mass P^t D 1_seeds is degree weighted, so low-degree members of C1 rank below "
        "high-degree outsiders when eps_max is this large";
  }
  return {ok ? Outcome::pass : Outcome::fail, detail};
}

Outcome solver_equivalence() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> rows_d(20, 100);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int good = 0;
  for (int sys = 0; sys < 50; ++sys) {
    const int rows = rows_d(rng);
    const int cols = std::uniform_int_distribution<int>(5, std::min(60, rows))(rng);
    oracle::Dense d;
    do {
      d = oracle::random_dense(rng, rows, cols, 0.3);
    } while (Eigen::FullPivLU<oracle::Dense>(d).rank() < cols);
    Vector y(static_cast<std::size_t>(rows));
    for (double& e : y) e = g(rng);
    const auto sol = lsqr(oracle::from_dense(d), y, {1e-14, 10000});
    const oracle::DVec ref = oracle::normal_equation_solve(d, oracle::to_eigen(y));
    const double rel = (oracle::to_eigen(sol.x) - ref).norm() / ref.norm();
    worst = std::max(worst, rel);
    good += rel <= kSolverRelTol;
  }
  return {good == 50 ? Outcome::pass : Outcome::fail,
          fmt("%d/50 systems within %.0e, worst relative difference %.2e", good, kSolverRelTol, worst)};
}

Outcome scaling() {
  BenchConfig cfg;
  cfg.params = defaults(1);
  cfg.master_seed = 707;
  const auto res = run_bench(cfg);
  std::string detail = fmt("slope %.3f (bound %.2f); median ms", res.slope, kSlopeBound);
  for (const auto& r : res.rows) detail += fmt(" n=%zu:%.1f", r.n, r.median_ms);
  return {res.slope <= kSlopeBound ? Outcome::pass : Outcome::fail, detail};
}

Outcome metric_correctness() {
  std::mt19937_64 rng(808);
  int good = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const std::size_t universe = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    std::bernoulli_distribution pa(std::uniform_real_distribution<double>(0, 1)(rng));
    std::bernoulli_distribution pb(std::uniform_real_distribution<double>(0, 1)(rng));
    std::set<Index> a, b;
    for (Index v = 0; v < universe; ++v) {
      if (pa(rng)) a.insert(v);
      if (pb(rng)) b.insert(v);
    }
    if (b.empty()) b.insert(0);
    std::size_t inter = 0;
    for (Index v : a) inter += b.count(v);
    const std::size_t uni = a.size() + b.size() - inter;
    const std::size_t sym = uni - inter;
    const double p = a.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(a.size());
    const double r = static_cast<double>(inter) / static_cast<double>(b.size());
    const double want_f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;

    const IndexSet sa(std::vector<Index>(a.begin(), a.end()));
    const IndexSet sb(std::vector<Index>(b.begin(), b.end()));
    const auto s = f1(sa, sb);
    good += jaccard(sa, sb) == static_cast<double>(inter) / static_cast<double>(uni) &&
            sym_diff_ratio(sa, sb) == static_cast<double>(sym) / static_cast<double>(b.size()) &&
            s.f1 == want_f1 && s.precision == p && s.recall == r;
  }
  return {good == 1000 ? Outcome::pass : Outcome::fail, fmt("%d/1000 pairs match exactly", good)};
}

Outcome mnist() {
  const char* points = std::getenv("LSCLUST_MNIST_POINTS");
  const char* labels = std::getenv("LSCLUST_MNIST_LABELS");
  if (!points || !labels || !std::filesystem::exists(points) || !std::filesystem::exists(labels)) {
    return {Outcome::skip, "set LSCLUST_MNIST_POINTS (CSV) and LSCLUST_MNIST_LABELS to run"};
  }
  const char* reject_env = std::getenv("LSCLUST_MNIST_REJECT");
  const double reject = reject_env ? std::atof(reject_env) : 0.5;
  const PointCloud x = io::read_points_csv(points);
  const GroundTruth truth = io::read_labels(labels, x.size());
  const Graph g = knn_graph(x, kMnistPreset.k, kMnistPreset.r, SymmetrizeMode::product);
  Rng rng(909, {0});
  const auto seeds = sample_seed_sets(truth, 1, 0.01, rng);
  std::vector<std::size_t> n_hats;
  for (std::size_t b = 0; b < seeds.size(); ++b) n_hats.push_back(truth.block(b).size());
  ExtractionParams p = defaults(1);
  p.pursuit.reject = reject;
  const auto lab = ilsc(g, seeds, n_hats, p, RemainderPolicy::nearest_seed_walk);
  const double acc = accuracy(lab, seeds, truth).accuracy;
  return {acc >= kMnistAccuracy ? Outcome::pass : Outcome::fail,
          fmt("accuracy %.4f (need %.3f), R = %.2f", acc, kMnistAccuracy, reject)};
}

}  // namespace

int main() {
  run(1, "exact recovery without inter-cluster edges", 5, exact_recovery);
  run(2, "block model accuracy sweep", 600, accuracy_sweep);
  run(3, "conditioning of the reduced Laplacian", 60, conditioning);
  run(4, "perturbation norm bound", 120, perturbation_bound);
  run(5, "random walk containment", 60, containment);
  run(6, "solver agrees with normal equations", 10, solver_equivalence);
  run(7, "runtime scaling", 300, scaling);
  run(8, "metric correctness", 5, metric_correctness);
  run(9, "MNIST reproduction (optional)", 3600, mnist);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
