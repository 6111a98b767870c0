#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "lsclust/io.hpp"

using namespace lsclust;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("lsclust_io_") + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Graph parse(const std::string& text, std::optional<std::size_t> n = std::nullopt) {
  std::istringstream in(text);
  return io::parse_edge_list(in, "<text>", n);
}

}  // namespace

TEST(EdgeList, Triangle) {
  const auto g = parse("0 1\n1 2\n# comment\n\n2 0\n");
  EXPECT_EQ(g.adjacency(),
            Graph::from_edges(3, std::vector<Graph::Edge>{{0, 1}, {1, 2}, {0, 2}}).adjacency());
}

TEST(EdgeList, WeightsAndDuplicatesSum) {
  const auto g = parse("0 1 0.5\n1 0 0.25\n1 2\n");
  EXPECT_EQ(g.adjacency().at(0, 1), 0.75);
  EXPECT_EQ(g.adjacency().at(1, 0), 0.75);
  EXPECT_EQ(g.degree(1), 1.75);
}

TEST(EdgeList, Errors) {
  EXPECT_THROW(parse("0 0\n"), ParseError);
  try {
    parse("0 1\n1 x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("0 1 2 3\n"), ParseError);
  EXPECT_THROW(parse("0 1 -1\n"), ParseError);
  EXPECT_THROW(parse("0 -1\n"), ParseError);
  EXPECT_THROW(parse("0 5\n", 3), DimensionError);
  EXPECT_THROW(io::read_edge_list("/nonexistent/file.txt"), ParseError);
}

TEST(EdgeList, RoundTripIsByteIdentical) {
  TempDir dir;
  std::mt19937_64 rng(1222);
  std::uniform_int_distribution<std::size_t> pick(0, 1221);
  std::uniform_real_distribution<double> weight(0.1, 3.0);
  // Scrambled input: random order, both orientations, repeated pairs.
  std::ostringstream raw;
  for (int i = 0; i < 8000; ++i) {
    const auto u = pick(rng), v = pick(rng);
    if (u == v) continue;
    raw << u << ' ' << v;
    if (i % 3 == 0) raw << ' ' << weight(rng);
    raw << '\n';
  }
  raw << "0 1221\n";
  write_text(dir.file("raw.txt"), raw.str());
  const Graph g = io::read_edge_list(dir.file("raw.txt"));
  ASSERT_EQ(g.size(), 1222u);
  io::write_edge_list(dir.file("a.txt"), g);
  const Graph back = io::load_graph(dir.file("a.txt"));
  EXPECT_EQ(back.adjacency(), g.adjacency());
  io::write_edge_list(dir.file("b.txt"), back);
  EXPECT_EQ(read_text(dir.file("a.txt")), read_text(dir.file("b.txt")));
}

TEST(EdgeList, HeaderKeepsTrailingIsolatedVertices) {
  TempDir dir;
  const Graph g = Graph::from_edges(5, std::vector<Graph::Edge>{{0, 1}});
  io::write_edge_list(dir.file("g.txt"), g);
  EXPECT_EQ(io::edge_list_vertex_count(dir.file("g.txt")), 5u);
  EXPECT_EQ(io::load_graph(dir.file("g.txt")).size(), 5u);
  EXPECT_EQ(io::read_edge_list(dir.file("g.txt")).size(), 2u);
}

TEST(Labels, ParseAndValidate) {
  std::istringstream ok("1 0\n0 1\n2 1\n");
  EXPECT_EQ(io::parse_labels(ok, "x").labels, (std::vector<std::size_t>{1, 0, 1}));
  std::istringstream empty("");
  EXPECT_THROW(io::parse_labels(empty, "x"), DimensionError);
  std::istringstream short_file("0 0\n1 0\n");
  EXPECT_THROW(io::parse_labels(short_file, "x", 3), DimensionError);
  std::istringstream dup("0 0\n0 1\n");
  EXPECT_THROW(io::parse_labels(dup, "x"), DimensionError);
  std::istringstream bad("0 a\n");
  EXPECT_THROW(io::parse_labels(bad, "x"), ParseError);
}

TEST(Labels, EmptyFileIsDimensionError) {
  TempDir dir;
  write_text(dir.file("labels.txt"), "");
  EXPECT_THROW(io::read_labels(dir.file("labels.txt")), DimensionError);
}

TEST(Labels, RoundTrip) {
  TempDir dir;
  const GroundTruth t{{2, 0, 1, 1, 0}};
  io::write_labels(dir.file("l.txt"), t);
  EXPECT_EQ(io::read_labels(dir.file("l.txt")).labels, t.labels);
}

TEST(PointsCsv, RoundTripTwoByTwo) {
  TempDir dir;
  const PointCloud x(2, 2, {0.1, -2.5, 1e-300, 3.0});
  io::write_points_csv(dir.file("p.csv"), x);
  const auto back = io::read_points_csv(dir.file("p.csv"));
  ASSERT_EQ(back.size(), 2u);
  ASSERT_EQ(back.dim(), 2u);
  EXPECT_TRUE(std::equal(back.data().begin(), back.data().end(), x.data().begin()));
}

TEST(PointsCsv, HeaderAndErrors) {
  std::istringstream with_header("a,b\n1, 2\n3,4\r\n");
  const auto x = io::parse_points_csv(with_header, "x");
  EXPECT_EQ(x.size(), 2u);
  EXPECT_EQ(x.point(1)[1], 4.0);
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(io::parse_points_csv(ragged, "x"), ParseError);
  std::istringstream text("1,2\nfoo,3\n");
  EXPECT_THROW(io::parse_points_csv(text, "x"), ParseError);
}

TEST(Seeds, RoundTrip) {
  TempDir dir;
  const std::vector<IndexSet> seeds{{4, 1}, {7}, {0, 9, 3}};
  io::write_seeds(dir.file("s.txt"), seeds);
  EXPECT_EQ(io::read_seeds(dir.file("s.txt")), seeds);
  write_text(dir.file("gap.txt"), "0 1\n2 3\n");
  EXPECT_THROW(io::read_seeds(dir.file("gap.txt")), ParseError);
}

TEST(VertexSet, RoundTrip) {
  TempDir dir;
  io::write_vertex_set(dir.file("v.txt"), IndexSet{5, 2, 8});
  EXPECT_EQ(io::read_vertex_set(dir.file("v.txt")), (IndexSet{2, 5, 8}));
}

TEST(Report, JsonRoundTrip) {
  TempDir dir;
  io::TrialReport t;
  ExtractionParams p;
  p.rw.n_hat = 200;
  p.pursuit.reject = 0.45;
  t.params = io::params_json(p);
  t.metrics = {0.9, 0.95, 0.97, 0.93, 0.1, 0.987654321, 12, {{0.9, 0.95, 0.97, 0.93, 0.1}}};
  t.wall_time_ms = 12.375;
  t.seed = 0xDEADBEEFCAFEULL;
  t.solver_iterations = 17;
  t.residual_norm = 1.0 / 3;
  t.solver_converged = false;
  t.omega_size = 320;
  t.removed_size = 64;
  t.cluster_size = 201;
  io::write_report(dir.file("r.json"), t, io::ReportFormat::json);
  const auto back = io::read_report_json(dir.file("r.json"));
  EXPECT_EQ(io::to_json(back), io::to_json(t));
  EXPECT_EQ(back.params.at("reject").get<double>(), 0.45);
  EXPECT_EQ(back.metrics.accuracy, t.metrics.accuracy);
  EXPECT_EQ(back.residual_norm, t.residual_norm);

  const auto j = io::to_json(t);
  for (const char* key : {"params", "metrics", "wall_time_ms", "seed", "version"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Report, MissingAccuracyIsNull) {
  io::TrialReport t;
  const auto j = io::to_json(t);
  EXPECT_TRUE(j.at("metrics").at("accuracy").is_null());
  EXPECT_FALSE(io::trial_report_from_json(j).metrics.accuracy.has_value());
}

TEST(Report, BadJsonIsParseError) {
  TempDir dir;
  write_text(dir.file("bad.json"), "{ not json");
  EXPECT_THROW(io::read_report_json(dir.file("bad.json")), ParseError);
  write_text(dir.file("v2.json"), R"({"version": 2})");
  EXPECT_THROW(io::read_report_json(dir.file("v2.json")), ParseError);
}

TEST(Report, CsvHasHeaderAndOneRow) {
  io::TrialReport t;
  t.metrics.jaccard = 0.5;
  std::ostringstream out;
  io::write_report(out, t, io::ReportFormat::csv);
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, io::kReportCsvHeader);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(1.0), "1");
  EXPECT_EQ(io::format_double(0.1), "0.1");
  const double x = 1.0 / 3;
  EXPECT_EQ(std::stod(io::format_double(x)), x);
}
