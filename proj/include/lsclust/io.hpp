#pragma once

// Text formats.
//
//   edge list   one edge per line, "u v [w]", 0-based ids, '#' comments.
//               Duplicate edges have their weights summed. The vertex count
//               is 1 + the largest id unless given explicitly.
//   labels      "vertex label" per line; vertices must be exactly 0..n-1.
//   points      CSV, one point per row; a non-numeric first row is a header.
//   seeds       "cluster vertex" per line; cluster ids 0..k-1.
//   vertex set  one vertex id per line.
//   report      JSON object {version, params, metrics, wall_time_ms, seed, solver}.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "lsclust/clustering.hpp"
#include "lsclust/errors.hpp"
#include "lsclust/knn_graph.hpp"
#include "lsclust/metrics.hpp"
#include "lsclust/models.hpp"
#include "lsclust/sparse.hpp"

namespace lsclust::io {

inline constexpr int kReportVersion = 1;

/// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

inline std::string_view strip_comment(std::string_view line) {
  const auto pos = line.find('#');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

inline Graph parse_edge_list(std::istream& in, const std::string& where,
                             std::optional<std::size_t> n = std::nullopt) {
  std::vector<Graph::Edge> edges;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(line));
    if (tok.empty()) continue;
    if (tok.size() < 2 || tok.size() > 3) {
      throw ParseError(where, lineno, "expected 'u v [w]'");
    }
    Graph::Edge e;
    if (!detail::parse_number(tok[0], e.u) || !detail::parse_number(tok[1], e.v)) {
      throw ParseError(where, lineno, "vertex ids must be non-negative integers");
    }
    if (tok.size() == 3 && (!detail::parse_number(tok[2], e.weight) || !(e.weight > 0.0) ||
                            !std::isfinite(e.weight))) {
      throw ParseError(where, lineno, "weight must be a positive finite number");
    }
    if (e.u == e.v) throw ParseError(where, lineno, "self-loop");
    max_id = std::max({max_id, e.u, e.v});
    any = true;
    edges.push_back(e);
  }
  const std::size_t count = n ? *n : (any ? max_id + 1 : 0);
  if (any && max_id >= count) {
    throw DimensionError(where + ": vertex id " + std::to_string(max_id) +
                         " exceeds declared vertex count " + std::to_string(count));
  }
  return Graph::from_edges(count, edges);
}

inline Graph read_edge_list(const std::string& path, std::optional<std::size_t> n = std::nullopt) {
  auto in = detail::open_in(path);
  return parse_edge_list(in, path, n);
}

/// Canonical form: "u v w" with u < v, rows ascending, shortest round-trip weights.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# vertices " << g.size() << "\n";
  for (const auto& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << format_double(e.weight) << '\n';
  }
}

inline void write_edge_list(const std::string& path, const Graph& g) {
  auto out = detail::open_out(path);
  write_edge_list(out, g);
}

/// Vertex count recorded in a "# vertices N" header, if present.
inline std::optional<std::size_t> edge_list_vertex_count(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    std::size_t n = 0;
    if (tok.size() == 3 && tok[0] == "#" && tok[1] == "vertices" && detail::parse_number(tok[2], n)) {
      return n;
    }
    if (tok[0].front() != '#') break;
  }
  return std::nullopt;
}

/// Reads an edge list, honoring a "# vertices N" header so trailing isolated
/// vertices survive a round trip.
inline Graph load_graph(const std::string& path) {
  return read_edge_list(path, edge_list_vertex_count(path));
}

inline GroundTruth parse_labels(std::istream& in, const std::string& where,
                                std::optional<std::size_t> n = std::nullopt) {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(line));
    if (tok.empty()) continue;
    std::size_t v = 0, l = 0;
    if (tok.size() != 2 || !detail::parse_number(tok[0], v) || !detail::parse_number(tok[1], l)) {
      throw ParseError(where, lineno, "expected 'vertex label'");
    }
    rows.emplace_back(v, l);
  }
  if (rows.empty()) throw DimensionError(where + ": no labels");
  const std::size_t count = n ? *n : rows.size();
  if (rows.size() != count) {
    throw DimensionError(where + ": " + std::to_string(rows.size()) + " labels for " +
                         std::to_string(count) + " vertices");
  }
  GroundTruth t;
  t.labels.assign(count, 0);
  std::vector<char> seen(count, 0);
  for (auto [v, l] : rows) {
    if (v >= count || seen[v]) {
      throw DimensionError(where + ": labels must cover vertices 0.." + std::to_string(count - 1) +
                           " exactly once");
    }
    seen[v] = 1;
    t.labels[v] = l;
  }
  return t;
}

inline GroundTruth read_labels(const std::string& path, std::optional<std::size_t> n = std::nullopt) {
  auto in = detail::open_in(path);
  return parse_labels(in, path, n);
}

inline void write_labels(std::ostream& out, const std::vector<std::int64_t>& labels) {
  for (std::size_t v = 0; v < labels.size(); ++v) out << v << ' ' << labels[v] << '\n';
}

inline void write_labels(const std::string& path, const GroundTruth& truth) {
  auto out = detail::open_out(path);
  for (std::size_t v = 0; v < truth.labels.size(); ++v) out << v << ' ' << truth.labels[v] << '\n';
}

inline PointCloud parse_points_csv(std::istream& in, const std::string& where) {
  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t m = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool numeric = true;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      auto field = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      double x = 0.0;
      if (!detail::parse_number(field, x)) {
        numeric = false;
        break;
      }
      row.push_back(x);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!numeric) {
      if (m == 0 && data.empty() && dim == 0) {
        dim = static_cast<std::size_t>(-1);  // header seen; width fixed by first data row
        continue;
      }
      throw ParseError(where, lineno, "non-numeric field");
    }
    if (dim == 0 || dim == static_cast<std::size_t>(-1)) {
      dim = row.size();
    } else if (row.size() != dim) {
      throw ParseError(where, lineno, "expected " + std::to_string(dim) + " fields");
    }
    data.insert(data.end(), row.begin(), row.end());
    ++m;
  }
  if (m == 0) return PointCloud();
  return PointCloud(m, dim, std::move(data));
}

inline PointCloud read_points_csv(const std::string& path) {
  auto in = detail::open_in(path);
  return parse_points_csv(in, path);
}

inline void write_points_csv(std::ostream& out, const PointCloud& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = x.point(i);
    for (std::size_t d = 0; d < p.size(); ++d) out << (d ? "," : "") << format_double(p[d]);
    out << '\n';
  }
}

inline void write_points_csv(const std::string& path, const PointCloud& x) {
  auto out = detail::open_out(path);
  write_points_csv(out, x);
}

/// Seed sets from "cluster vertex" lines; cluster ids must be 0..k-1.
inline std::vector<IndexSet> read_seeds(const std::string& path) {
  auto in = detail::open_in(path);
  std::map<std::size_t, std::vector<Index>> sets;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(line));
    if (tok.empty()) continue;
    std::size_t c = 0, v = 0;
    if (tok.size() != 2 || !detail::parse_number(tok[0], c) || !detail::parse_number(tok[1], v)) {
      throw ParseError(path, lineno, "expected 'cluster vertex'");
    }
    sets[c].push_back(v);
  }
  std::vector<IndexSet> out;
  for (auto& [c, ids] : sets) {
    if (c != out.size()) throw ParseError(path, 0, "seed cluster ids must be 0..k-1");
    out.emplace_back(std::move(ids));
  }
  return out;
}

inline void write_seeds(const std::string& path, const std::vector<IndexSet>& seeds) {
  auto out = detail::open_out(path);
  for (std::size_t c = 0; c < seeds.size(); ++c) {
    for (Index v : seeds[c]) out << c << ' ' << v << '\n';
  }
}

inline IndexSet read_vertex_set(const std::string& path) {
  auto in = detail::open_in(path);
  std::vector<Index> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(detail::strip_comment(line));
    if (tok.empty()) continue;
    Index v = 0;
    if (tok.size() != 1 || !detail::parse_number(tok[0], v)) {
      throw ParseError(path, lineno, "expected one vertex id");
    }
    ids.push_back(v);
  }
  return IndexSet(std::move(ids));
}

inline void write_vertex_set(const std::string& path, const IndexSet& s) {
  auto out = detail::open_out(path);
  for (Index v : s) out << v << '\n';
}

/// One run of an extraction, as serialized by the CLI and the sweep driver.
struct TrialReport {
  nlohmann::json params = nlohmann::json::object();
  EvalReport metrics;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
  std::size_t solver_iterations = 0;
  double residual_norm = 0.0;
  bool solver_converged = true;
  std::size_t omega_size = 0;
  std::size_t removed_size = 0;
  std::size_t cluster_size = 0;
};

inline nlohmann::json params_json(const ExtractionParams& p) {
  return {{"delta", p.rw.delta},           {"depth", p.rw.depth},
          {"n_hat", p.rw.n_hat},           {"gamma", p.pursuit.gamma},
          {"reject", p.pursuit.reject},    {"max_iter", p.max_iter},
          {"lsqr_tol", p.solver.tol},      {"lsqr_max_iter", p.solver.max_iter}};
}

inline nlohmann::json to_json(const SetReport& s) {
  return {{"jaccard", s.jaccard},
          {"f1", s.f1},
          {"precision", s.precision},
          {"recall", s.recall},
          {"sym_diff_ratio", s.sym_diff_ratio}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = {{"jaccard", r.jaccard},
                      {"f1", r.f1},
                      {"precision", r.precision},
                      {"recall", r.recall},
                      {"sym_diff_ratio", r.sym_diff_ratio},
                      {"misclassified_count", r.misclassified_count}};
  j["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
  j["per_cluster"] = nlohmann::json::array();
  for (const auto& c : r.per_cluster) j["per_cluster"].push_back(to_json(c));
  return j;
}

inline EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.jaccard = j.at("jaccard").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.sym_diff_ratio = j.at("sym_diff_ratio").get<double>();
  r.misclassified_count = j.at("misclassified_count").get<std::size_t>();
  if (!j.at("accuracy").is_null()) r.accuracy = j.at("accuracy").get<double>();
  for (const auto& c : j.at("per_cluster")) {
    r.per_cluster.push_back({c.at("jaccard").get<double>(), c.at("f1").get<double>(),
                             c.at("precision").get<double>(), c.at("recall").get<double>(),
                             c.at("sym_diff_ratio").get<double>()});
  }
  return r;
}

inline nlohmann::json to_json(const TrialReport& t) {
  return {{"version", kReportVersion},
          {"params", t.params},
          {"metrics", to_json(t.metrics)},
          {"wall_time_ms", t.wall_time_ms},
          {"seed", t.seed},
          {"solver",
           {{"iterations", t.solver_iterations},
            {"residual_norm", t.residual_norm},
            {"converged", t.solver_converged},
            {"omega_size", t.omega_size},
            {"removed_size", t.removed_size},
            {"cluster_size", t.cluster_size}}}};
}

inline TrialReport trial_report_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kReportVersion) {
    throw ParseError("report", 0, "unsupported report version");
  }
  TrialReport t;
  t.params = j.at("params");
  t.metrics = eval_report_from_json(j.at("metrics"));
  t.wall_time_ms = j.at("wall_time_ms").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  const auto& s = j.at("solver");
  t.solver_iterations = s.at("iterations").get<std::size_t>();
  t.residual_norm = s.at("residual_norm").get<double>();
  t.solver_converged = s.at("converged").get<bool>();
  t.omega_size = s.at("omega_size").get<std::size_t>();
  t.removed_size = s.at("removed_size").get<std::size_t>();
  t.cluster_size = s.at("cluster_size").get<std::size_t>();
  return t;
}

enum class ReportFormat { json, csv };

inline constexpr const char* kReportCsvHeader =
    "seed,jaccard,f1,precision,recall,sym_diff_ratio,accuracy,misclassified,wall_time_ms,"
    "solver_iterations,residual_norm,converged,omega_size,removed_size,cluster_size";

inline void write_report(std::ostream& out, const TrialReport& t, ReportFormat format) {
  if (format == ReportFormat::json) {
    out << to_json(t).dump(2) << '\n';
    return;
  }
  const auto& m = t.metrics;
  out << kReportCsvHeader << '\n'
      << t.seed << ',' << format_double(m.jaccard) << ',' << format_double(m.f1) << ','
      << format_double(m.precision) << ',' << format_double(m.recall) << ','
      << format_double(m.sym_diff_ratio) << ','
      << (m.accuracy ? format_double(*m.accuracy) : std::string()) << ','
      << m.misclassified_count << ',' << format_double(t.wall_time_ms) << ','
      << t.solver_iterations << ',' << format_double(t.residual_norm) << ','
      << (t.solver_converged ? 1 : 0) << ',' << t.omega_size << ',' << t.removed_size << ','
      << t.cluster_size << '\n';
}

inline void write_report(const std::string& path, const TrialReport& t, ReportFormat format) {
  auto out = detail::open_out(path);
  write_report(out, t, format);
}

inline TrialReport read_report_json(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return trial_report_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace lsclust::io
