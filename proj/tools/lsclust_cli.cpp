// lsclust command line: graph generation, extraction, partitioning,
// evaluation and experiment sweeps.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsclust/lsclust.hpp"

namespace {

using namespace lsclust;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct AlgoFlags {
  double delta = 0.6;
  std::size_t depth = 3;
  double gamma = 0.2;
  double reject = 0.0;
  std::size_t max_iter = 1;
  double lsqr_tol = 1e-6;
  std::size_t lsqr_max_iter = 1000;

  ExtractionParams params() const {
    ExtractionParams p;
    p.rw.delta = delta;
    p.rw.depth = depth;
    p.pursuit.gamma = gamma;
    p.pursuit.reject = reject;
    p.max_iter = max_iter;
    p.solver = {lsqr_tol, lsqr_max_iter};
    return p;
  }
};

void add_algo_flags(CLI::App* cmd, AlgoFlags& f, bool reject_required) {
  cmd->add_option("--delta", f.delta, "Threshold oversampling factor in (0,1)")->capture_default_str();
  cmd->add_option("--depth", f.depth, "Random walk depth")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Fraction of candidate columns removed")->capture_default_str();
  auto* r = cmd->add_option("--reject", f.reject, "Rejection threshold R in [0.1,0.9]");
  if (reject_required) r->required();
  cmd->add_option("--max-iter", f.max_iter, "Alternation rounds")->capture_default_str();
  cmd->add_option("--lsqr-tol", f.lsqr_tol, "Least squares relative tolerance")->capture_default_str();
  cmd->add_option("--lsqr-max-iter", f.lsqr_max_iter, "Least squares iteration cap")->capture_default_str();
}

std::vector<std::int64_t> read_assignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<std::pair<std::size_t, std::int64_t>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = io::detail::split_ws(io::detail::strip_comment(line));
    if (tok.empty()) continue;
    std::size_t v = 0;
    std::int64_t l = 0;
    if (tok.size() != 2 || !io::detail::parse_number(tok[0], v) || !io::detail::parse_number(tok[1], l) ||
        l < ClusterLabeling::kUnassigned) {
      throw ParseError(path, lineno, "expected 'vertex label' with label >= -1");
    }
    rows.emplace_back(v, l);
  }
  if (rows.empty()) throw DimensionError(path + ": no labels");
  std::vector<std::int64_t> out(rows.size(), ClusterLabeling::kUnassigned);
  std::vector<char> seen(rows.size(), 0);
  for (auto [v, l] : rows) {
    if (v >= rows.size() || seen[v]) throw DimensionError(path + ": labels must cover 0..n-1 once");
    seen[v] = 1;
    out[v] = l;
  }
  return out;
}

ClusterLabeling labeling_from(const std::vector<std::int64_t>& assignments) {
  ClusterLabeling lab;
  lab.assignments = assignments;
  std::int64_t k = 0;
  for (auto a : assignments) k = std::max(k, a + 1);
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (Index v = 0; v < assignments.size(); ++v) {
    if (assignments[v] >= 0) members[static_cast<std::size_t>(assignments[v])].push_back(v);
  }
  for (auto& m : members) lab.clusters.push_back(IndexSet::from_sorted(std::move(m)));
  return lab;
}

std::vector<std::size_t> block_sizes(const GroundTruth& t) {
  std::vector<std::size_t> out(t.block_count(), 0);
  for (auto l : t.labels) ++out[l];
  return out;
}

io::ReportFormat parse_format(const std::string& s) {
  if (s == "json") return io::ReportFormat::json;
  if (s == "csv") return io::ReportFormat::csv;
  throw ParameterError("unknown report format '" + s + "'");
}

void emit_report(const io::TrialReport& r, const std::string& path, const std::string& format) {
  if (path.empty() || path == "-") {
    io::write_report(std::cout, r, parse_format(format));
  } else {
    io::write_report(path, r, parse_format(format));
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least squares local cluster extraction on graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lsclust 0.1.0");

  // gen-sbm
  auto* gen = app.add_subcommand("gen-sbm", "Sample a stochastic block model graph");
  std::size_t gen_n = 0, gen_k = 3;
  std::vector<std::size_t> gen_sizes;
  double gen_p = -1, gen_q = -1, gen_p_scale = 8.0, gen_q_scale = 1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_labels;
  bool gen_drop = false;
  gen->add_option("--n", gen_n, "Vertex count (equal blocks)");
  gen->add_option("--k", gen_k, "Block count with --n")->capture_default_str();
  gen->add_option("--sizes", gen_sizes, "Explicit block sizes")->delimiter(',')->excludes("--n");
  gen->add_option("--p", gen_p, "Intra-block edge probability");
  gen->add_option("--q", gen_q, "Inter-block edge probability");
  gen->add_option("--p-scale", gen_p_scale, "p = scale * ln(n) / n when --p is absent")->capture_default_str();
  gen->add_option("--q-scale", gen_q_scale, "q = scale * ln(n) / n when --q is absent")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Edge list output")->required();
  gen->add_option("--labels", gen_labels, "Ground-truth label output");
  gen->add_flag("--drop-isolated", gen_drop, "Remove zero-degree vertices and compact ids");

  // build-knn
  auto* knn = app.add_subcommand("build-knn", "Build a K-NN Gaussian affinity graph from points");
  std::string knn_points, knn_out, knn_preset, knn_sym = "product";
  std::size_t knn_k = 0, knn_r = 0;
  unsigned knn_threads = 0;
  knn->add_option("--points", knn_points, "CSV of points, one per row")->required();
  knn->add_option("--preset", knn_preset, "Scale preset")->check(CLI::IsMember({"mnist", "yaleb", "att"}));
  knn->add_option("--k", knn_k, "Neighbors per point");
  knn->add_option("--r", knn_r, "Rank of the neighbor that sets the local scale");
  knn->add_option("--symmetrize", knn_sym, "product | max | average")->capture_default_str();
  knn->add_option("--threads", knn_threads, "Worker threads (0 = all cores)");
  knn->add_option("--out", knn_out, "Edge list output")->required();

  // extract
  auto* ext = app.add_subcommand("extract", "Extract the cluster around a seed set");
  AlgoFlags ext_flags;
  add_algo_flags(ext, ext_flags, true);
  std::string ext_graph, ext_seeds_file, ext_labels, ext_out, ext_report, ext_format = "json";
  std::vector<std::size_t> ext_seeds;
  std::size_t ext_nhat = 0, ext_cluster = 0, ext_block = 0;
  double ext_frac = 0.0;
  std::uint64_t ext_master = 1;
  ext->add_option("--graph", ext_graph, "Edge list")->required();
  ext->add_option("--seeds", ext_seeds, "Seed vertices")->delimiter(',');
  ext->add_option("--seeds-file", ext_seeds_file, "Seed file of 'cluster vertex' lines");
  ext->add_option("--cluster", ext_cluster, "Which seed cluster of --seeds-file to use")->capture_default_str();
  ext->add_option("--seeds-frac", ext_frac, "Sample this fraction of --block as seeds");
  ext->add_option("--labels", ext_labels, "Ground truth for evaluation and sampling");
  ext->add_option("--block", ext_block, "Target block in --labels")->capture_default_str();
  ext->add_option("--nhat", ext_nhat, "Estimated cluster size (defaults to the block size)");
  ext->add_option("--master-seed", ext_master, "Seed for --seeds-frac sampling")->capture_default_str();
  ext->add_option("--out", ext_out, "Cluster vertex list output (default stdout)");
  ext->add_option("--report", ext_report, "Report output");
  ext->add_option("--format", ext_format, "json | csv")->capture_default_str();

  // partition
  auto* part = app.add_subcommand("partition", "Extract clusters one at a time");
  AlgoFlags part_flags;
  add_algo_flags(part, part_flags, true);
  std::string part_graph, part_seeds_file, part_labels, part_out, part_report, part_format = "json",
                                                                              part_remainder = "unassigned";
  std::vector<std::size_t> part_nhat;
  double part_frac = 0.0;
  std::uint64_t part_master = 1;
  bool part_micro = false;
  part->add_option("--graph", part_graph, "Edge list")->required();
  part->add_option("--seeds-file", part_seeds_file, "Seed file of 'cluster vertex' lines");
  part->add_option("--seeds-frac", part_frac, "Sample this fraction of every block as seeds");
  part->add_option("--labels", part_labels, "Ground truth for evaluation and sampling");
  part->add_option("--nhat", part_nhat, "Estimated size per cluster")->delimiter(',');
  part->add_option("--remainder", part_remainder, "unassigned | last | nearest-seed-walk")
      ->check(CLI::IsMember({"unassigned", "last", "nearest-seed-walk"}))
      ->capture_default_str();
  part->add_option("--master-seed", part_master, "Seed for --seeds-frac sampling")->capture_default_str();
  part->add_option("--out", part_out, "Label output (default stdout)");
  part->add_option("--report", part_report, "Report output");
  part->add_option("--format", part_format, "json | csv")->capture_default_str();
  part->add_flag("--micro", part_micro, "Pool counts over clusters instead of averaging");

  // eval
  auto* ev = app.add_subcommand("eval", "Score a cluster or labeling against ground truth");
  std::string ev_pred_set, ev_pred_labels, ev_truth, ev_seeds_file, ev_format = "json";
  std::size_t ev_block = 0;
  bool ev_micro = false;
  ev->add_option("--pred", ev_pred_set, "Predicted cluster vertex list");
  ev->add_option("--pred-labels", ev_pred_labels, "Predicted 'vertex label' file (-1 = unassigned)");
  ev->add_option("--truth", ev_truth, "Ground-truth labels")->required();
  ev->add_option("--block", ev_block, "True block for --pred")->capture_default_str();
  ev->add_option("--seeds-file", ev_seeds_file, "Seeds that fix cluster identities for --pred-labels");
  ev->add_option("--format", ev_format, "json | csv")->capture_default_str();
  ev->add_flag("--micro", ev_micro, "Pool counts over clusters instead of averaging");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Monte-Carlo accuracy sweep on symmetric block models");
  AlgoFlags sw_flags;
  add_algo_flags(sw, sw_flags, true);
  SweepConfig sw_cfg;
  std::string sw_mode = "lsc", sw_out, sw_remainder = "unassigned";
  sw->add_option("--ns", sw_cfg.ns, "Graph sizes")->delimiter(',')->capture_default_str();
  sw->add_option("--k", sw_cfg.k, "Blocks")->capture_default_str();
  sw->add_option("--p-scale", sw_cfg.p_scale, "p = scale * ln(n) / n")->capture_default_str();
  sw->add_option("--q-scale", sw_cfg.q_scale, "q = scale * ln(n) / n")->capture_default_str();
  sw->add_option("--trials", sw_cfg.trials, "Trials per size")->capture_default_str();
  sw->add_option("--seeds", sw_cfg.seeds_per_cluster, "Seeds per cluster")->capture_default_str();
  sw->add_option("--seeds-frac", sw_cfg.seeds_frac, "Seed fraction per cluster (overrides --seeds)");
  sw->add_option("--mode", sw_mode, "lsc | ilsc")->check(CLI::IsMember({"lsc", "ilsc"}))->capture_default_str();
  sw->add_option("--remainder", sw_remainder, "ILSC remainder policy")
      ->check(CLI::IsMember({"unassigned", "last", "nearest-seed-walk"}));
  sw->add_option("--master-seed", sw_cfg.master_seed, "Master seed")->capture_default_str();
  sw->add_option("--threads", sw_cfg.threads, "Concurrent trials")->capture_default_str();
  sw->add_option("--out", sw_out, "CSV output (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "Runtime scaling of extraction with graph size");
  AlgoFlags bench_flags;
  add_algo_flags(bench, bench_flags, true);
  BenchConfig bench_cfg;
  std::string bench_out;
  bench->add_option("--ns", bench_cfg.ns, "Graph sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--k", bench_cfg.k, "Blocks")->capture_default_str();
  bench->add_option("--p-scale", bench_cfg.p_scale, "p = scale * ln(n) / n")->capture_default_str();
  bench->add_option("--q-scale", bench_cfg.q_scale, "q = scale * ln(n) / n")->capture_default_str();
  bench->add_option("--reps", bench_cfg.repetitions, "Timed repetitions per size")->capture_default_str();
  bench->add_option("--master-seed", bench_cfg.master_seed, "Master seed")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  auto parse_remainder = [](const std::string& s) {
    if (s == "last") return RemainderPolicy::last;
    if (s == "nearest-seed-walk") return RemainderPolicy::nearest_seed_walk;
    return RemainderPolicy::unassigned;
  };

  try {
    if (*gen) {
      const std::size_t n = gen_sizes.empty() ? gen_n : 0;
      if (gen_sizes.empty() && n == 0) throw ParameterError("give --n or --sizes");
      SbmSpec spec;
      spec.block_sizes = gen_sizes;
      if (spec.block_sizes.empty()) {
        if (gen_k < 1 || gen_k > n) throw ParameterError("--k must lie in [1, n]");
        spec.block_sizes.assign(gen_k, n / gen_k);
        for (std::size_t b = 0; b < n % gen_k; ++b) ++spec.block_sizes[b];
      }
      const std::size_t total = spec.vertex_count();
      spec.p_in = gen_p >= 0 ? gen_p : ssbm_p(gen_p_scale, total);
      spec.p_out = gen_q >= 0 ? gen_q : ssbm_p(gen_q_scale, total);
      spec.rng_seed = gen_seed;
      spec.validate();
      LabeledGraph lg = generate_sbm(spec);
      if (gen_drop) lg = drop_isolated(lg).labeled;
      io::write_edge_list(gen_out, lg.graph);
      if (!gen_labels.empty()) io::write_labels(gen_labels, lg.truth);
      std::cerr << "vertices " << lg.graph.size() << " edges " << lg.graph.adjacency().nnz() / 2 << '\n';
      return 0;
    }

    if (*knn) {
      std::size_t k = knn_k, r = knn_r;
      if (!knn_preset.empty()) {
        const KnnPreset p = knn_preset == "mnist" ? kMnistPreset
                            : knn_preset == "yaleb" ? kYaleBPreset
                                                    : kAttPreset;
        if (k == 0) k = p.k;
        if (r == 0) r = p.r;
      }
      if (k == 0 || r == 0) throw ParameterError("give --preset or both --k and --r");
      const auto mode = parse_symmetrize_mode(knn_sym);
      const PointCloud x = io::read_points_csv(knn_points);
      const auto aff = knn_affinity(x, k, r, knn_threads);
      if (!aff.floored_scales.empty()) {
        std::cerr << "warning: " << aff.floored_scales.size()
                  << " points have duplicate neighbors; their scale was floored\n";
      }
      const Graph g(symmetrize(aff.affinity, mode));
      io::write_edge_list(knn_out, g);
      std::cerr << "vertices " << g.size() << " edges " << g.adjacency().nnz() / 2 << '\n';
      return 0;
    }

    if (*ext) {
      const Graph g = io::load_graph(ext_graph);
      std::optional<GroundTruth> truth;
      if (!ext_labels.empty()) truth = io::read_labels(ext_labels, g.size());
      IndexSet seeds;
      if (!ext_seeds.empty()) {
        seeds = IndexSet(ext_seeds);
      } else if (!ext_seeds_file.empty()) {
        const auto sets = io::read_seeds(ext_seeds_file);
        if (ext_cluster >= sets.size()) throw ParameterError("--cluster exceeds the seed file's clusters");
        seeds = sets[ext_cluster];
      } else if (ext_frac > 0.0) {
        if (!truth) throw ParameterError("--seeds-frac needs --labels");
        Rng rng(ext_master, {0});
        const IndexSet block = truth->block(ext_block);
        const auto count = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::round(ext_frac * static_cast<double>(block.size()))));
        seeds = IndexSet(rng.sample(block.ids(), count));
      } else {
        throw ParameterError("give --seeds, --seeds-file or --seeds-frac");
      }
      ExtractionParams params = ext_flags.params();
      params.rw.n_hat = ext_nhat;
      if (params.rw.n_hat == 0) {
        if (!truth) throw ParameterError("give --nhat or --labels");
        params.rw.n_hat = truth->block(ext_block).size();
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = lsc(g, seeds, params);
      const double ms = elapsed_ms(t0);
      if (res.degenerate) std::cerr << "warning: an extraction round produced an empty cluster\n";

      if (ext_out.empty()) {
        for (Index v : res.cluster) std::cout << v << '\n';
      } else {
        io::write_vertex_set(ext_out, res.cluster);
      }
      if (!ext_report.empty()) {
        io::TrialReport rep;
        rep.params = io::params_json(params);
        if (truth) rep.metrics = evaluate_extraction(res.cluster, truth->block(ext_block), g.size());
        rep.wall_time_ms = ms;
        rep.seed = ext_master;
        rep.solver_iterations = res.solver_iterations;
        rep.residual_norm = res.residual_norm;
        rep.solver_converged = res.solver_converged;
        rep.omega_size = res.omega_size;
        rep.removed_size = res.removed.size();
        rep.cluster_size = res.cluster.size();
        emit_report(rep, ext_report, ext_format);
      }
      return 0;
    }

    if (*part) {
      const Graph g = io::load_graph(part_graph);
      std::optional<GroundTruth> truth;
      if (!part_labels.empty()) truth = io::read_labels(part_labels, g.size());
      std::vector<IndexSet> seeds;
      if (!part_seeds_file.empty()) {
        seeds = io::read_seeds(part_seeds_file);
      } else if (part_frac > 0.0) {
        if (!truth) throw ParameterError("--seeds-frac needs --labels");
        Rng rng(part_master, {0});
        seeds = sample_seed_sets(*truth, 1, part_frac, rng);
      } else {
        throw ParameterError("give --seeds-file or --seeds-frac");
      }
      std::vector<std::size_t> n_hats = part_nhat;
      if (n_hats.empty()) {
        if (!truth) throw ParameterError("give --nhat or --labels");
        const auto ids = seed_identities(seeds, *truth);
        const auto sizes = block_sizes(*truth);
        for (auto id : ids) n_hats.push_back(sizes[id]);
      }
      const ExtractionParams params = part_flags.params();
      const auto t0 = std::chrono::steady_clock::now();
      const auto lab = ilsc(g, seeds, n_hats, params, parse_remainder(part_remainder));
      const double ms = elapsed_ms(t0);
      for (const auto& w : lab.warnings) std::cerr << "warning: " << w << '\n';

      if (part_out.empty()) {
        io::write_labels(std::cout, lab.assignments);
      } else {
        std::ofstream out(part_out);
        if (!out) throw Error("cannot open '" + part_out + "' for writing");
        io::write_labels(out, lab.assignments);
      }
      if (!part_report.empty()) {
        io::TrialReport rep;
        rep.params = io::params_json(params);
        rep.params["remainder"] = part_remainder;
        rep.params.erase("n_hat");
        rep.params["n_hats"] = n_hats;
        if (truth) rep.metrics = evaluate_labeling(lab, seeds, *truth, part_micro);
        rep.wall_time_ms = ms;
        rep.seed = part_master;
        for (const auto& d : lab.diagnostics) {
          rep.solver_iterations += d.solver_iterations;
          rep.residual_norm = std::max(rep.residual_norm, d.residual_norm);
          rep.solver_converged = rep.solver_converged && d.solver_converged;
          rep.omega_size += d.omega_size;
          rep.removed_size += d.removed.size();
          rep.cluster_size += d.cluster.size();
        }
        emit_report(rep, part_report, part_format);
      }
      return 0;
    }

    if (*ev) {
      io::TrialReport rep;
      if (!ev_pred_set.empty() == !ev_pred_labels.empty()) {
        throw ParameterError("give exactly one of --pred and --pred-labels");
      }
      if (!ev_pred_set.empty()) {
        const IndexSet pred = io::read_vertex_set(ev_pred_set);
        const GroundTruth truth = io::read_labels(ev_truth);
        pred.validate(truth.labels.size());
        rep.metrics = evaluate_extraction(pred, truth.block(ev_block), truth.labels.size());
        rep.cluster_size = pred.size();
      } else {
        const auto assignments = read_assignments(ev_pred_labels);
        const GroundTruth truth = io::read_labels(ev_truth, assignments.size());
        const auto lab = labeling_from(assignments);
        if (ev_seeds_file.empty()) {
          // Without seeds, cluster i is taken to stand for true block i.
          std::vector<std::size_t> identity(lab.clusters.size());
          for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
          std::vector<IndexSet> pseudo;
          for (std::size_t i = 0; i < identity.size(); ++i) {
            const IndexSet b = truth.block(i);
            if (b.empty()) throw DimensionError("cluster " + std::to_string(i) + " has no matching true block");
            pseudo.push_back(IndexSet{b[0]});
          }
          rep.metrics = evaluate_labeling(lab, pseudo, truth, ev_micro);
        } else {
          rep.metrics = evaluate_labeling(lab, io::read_seeds(ev_seeds_file), truth, ev_micro);
        }
      }
      io::write_report(std::cout, rep, parse_format(ev_format));
      return 0;
    }

    if (*sw) {
      sw_cfg.params = sw_flags.params();
      sw_cfg.mode = sw_mode == "ilsc" ? ExperimentMode::ilsc : ExperimentMode::lsc;
      sw_cfg.remainder = parse_remainder(sw_remainder);
      sw_cfg.params.validate(std::numeric_limits<Index>::max());
      const auto res = run_experiment(sw_cfg);
      if (sw_out.empty()) {
        write_sweep_csv(std::cout, res);
      } else {
        std::ofstream out(sw_out);
        if (!out) throw Error("cannot open '" + sw_out + "' for writing");
        write_sweep_csv(out, res);
      }
      for (const auto& a : res.aggregates) {
        std::cerr << "n=" << a.n << " trials=" << a.count << " failed=" << a.failures
                  << " mean_jaccard=" << io::format_double(a.mean_jaccard) << '\n';
      }
      return 0;
    }

    if (*bench) {
      bench_cfg.params = bench_flags.params();
      const auto res = run_bench(bench_cfg);
      if (bench_out.empty()) {
        write_bench_csv(std::cout, res);
      } else {
        std::ofstream out(bench_out);
        if (!out) throw Error("cannot open '" + bench_out + "' for writing");
        write_bench_csv(out, res);
      }
      std::cerr << "loglog slope " << io::format_double(res.slope) << '\n';
      return 0;
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
