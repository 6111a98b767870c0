#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lsclust/knn_graph.hpp"
#include "oracles.hpp"

using namespace lsclust;

namespace {

PointCloud collinear() { return PointCloud(3, 1, {0.0, 1.0, 3.0}); }

PointCloud random_cloud(std::size_t m, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> data(m * dim);
  for (double& v : data) v = g(rng);
  return PointCloud(m, dim, std::move(data));
}

}  // namespace

TEST(KnnAffinity, TwoPoints) {
  const auto a = knn_affinity(PointCloud(2, 2, {0.0, 0.0, 3.0, 4.0}), 1, 1);
  EXPECT_DOUBLE_EQ(a.affinity.at(0, 1), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(a.affinity.at(1, 0), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(a.sigma[0], 5.0);
}

TEST(KnnAffinity, CollinearHandComputed) {
  const auto a = knn_affinity(collinear(), 2, 1);
  EXPECT_EQ(a.sigma, (Vector{1.0, 1.0, 2.0}));
  const auto& m = a.affinity;
  EXPECT_DOUBLE_EQ(m.at(0, 1), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(m.at(0, 2), std::exp(-9.0 / 2));
  EXPECT_DOUBLE_EQ(m.at(1, 0), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(m.at(1, 2), std::exp(-4.0 / 2));
  EXPECT_DOUBLE_EQ(m.at(2, 1), std::exp(-4.0 / 2));
  EXPECT_DOUBLE_EQ(m.at(2, 0), std::exp(-9.0 / 2));
  EXPECT_EQ(m.nnz(), 6u);
}

TEST(KnnAffinity, NeighborSetsMatchExhaustiveOracle) {
  const auto x = random_cloud(150, 4, 7);
  const std::size_t k = 8;
  const auto a = knn_affinity(x, k, 5, 3);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vector d(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.dim(); ++c) s += std::pow(x.point(i)[c] - x.point(j)[c], 2);
      d[j] = j == i ? INFINITY : s;
    }
    const auto order = oracle::sorted_asc(d);
    const std::vector<Index> want(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    EXPECT_EQ(a.neighbors[i], want) << "point " << i;
    EXPECT_EQ(a.affinity.row_cols(i).size(), k);
    EXPECT_NEAR(a.sigma[i], std::sqrt(d[want[4]]), 1e-12);
  }
}

TEST(KnnAffinity, ThreadCountDoesNotChangeResult) {
  const auto x = random_cloud(97, 3, 8);
  EXPECT_EQ(knn_affinity(x, 6, 3, 1).affinity, knn_affinity(x, 6, 3, 4).affinity);
}

TEST(KnnAffinity, EntriesInUnitIntervalAndMonotone) {
  const auto x = random_cloud(80, 2, 9);
  const auto a = knn_affinity(x, 10, 4);
  for (double v : a.affinity.values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double prev = 0.0;
    for (Index j : a.neighbors[i]) {
      const double d2 = squared_distance(x.point(i), x.point(j));
      EXPECT_NEAR(-std::log(a.affinity.at(i, j)) * a.sigma[i] * a.sigma[j], d2, 1e-9 * (1 + d2));
      EXPECT_LE(prev, d2);
      prev = d2;
    }
  }
}

TEST(KnnAffinity, DuplicatePointsFloorScale) {
  const auto a = knn_affinity(PointCloud(3, 1, {2.0, 2.0, 5.0}), 1, 1);
  EXPECT_EQ(a.floored_scales, (std::vector<Index>{0, 1}));
  EXPECT_DOUBLE_EQ(a.sigma[0], 5e-12);
  EXPECT_EQ(a.affinity.at(0, 1), 1.0);
}

TEST(KnnAffinity, Validation) {
  EXPECT_THROW(knn_affinity(collinear(), 3, 1), ParameterError);
  EXPECT_THROW(knn_affinity(collinear(), 1, 2), ParameterError);
  EXPECT_THROW(knn_affinity(collinear(), 2, 0), ParameterError);
  EXPECT_THROW(knn_affinity(PointCloud(1, 1, {0.0}), 1, 1), ParameterError);
  EXPECT_THROW(PointCloud(2, 1, {0.0, NAN}), ParameterError);
  EXPECT_THROW(PointCloud(2, 2, {0.0}), DimensionError);
}

TEST(Symmetrize, MaxOnSymmetricInputIsIdentity) {
  const SparseMatrix s(3, 3, {{0, 1, 0.5}, {1, 0, 0.5}, {1, 2, 2.0}, {2, 1, 2.0}});
  EXPECT_EQ(symmetrize(s, SymmetrizeMode::max), s);
  EXPECT_EQ(symmetrize(s, SymmetrizeMode::average), s);
}

TEST(Symmetrize, AverageOfDirectedEdge) {
  const SparseMatrix a(2, 2, {{0, 1, 1.0}});
  EXPECT_EQ(symmetrize(a, SymmetrizeMode::average), SparseMatrix(2, 2, {{0, 1, 0.5}, {1, 0, 0.5}}));
  EXPECT_EQ(symmetrize(a, SymmetrizeMode::max), SparseMatrix(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}}));
}

TEST(Symmetrize, ProductMatchesDenseOracle) {
  const auto a = knn_affinity(collinear(), 2, 1).affinity;
  oracle::Dense want = oracle::to_dense(a).transpose() * oracle::to_dense(a);
  want.diagonal().setZero();
  const oracle::Dense got = oracle::to_dense(symmetrize(a, SymmetrizeMode::product));
  EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-15);

  const auto big = knn_affinity(random_cloud(60, 3, 2), 5, 3).affinity;
  oracle::Dense want_big = oracle::to_dense(big).transpose() * oracle::to_dense(big);
  want_big.diagonal().setZero();
  const oracle::Dense got_big = oracle::to_dense(symmetrize(big, SymmetrizeMode::product));
  EXPECT_LE((got_big - want_big).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Symmetrize, ExactlySymmetricAndGraphValid) {
  const auto a = knn_affinity(random_cloud(120, 5, 3), 7, 4).affinity;
  for (auto mode : {SymmetrizeMode::product, SymmetrizeMode::max, SymmetrizeMode::average}) {
    const auto s = symmetrize(a, mode);
    EXPECT_EQ(transpose(s), s);
    EXPECT_NO_THROW(Graph{s});
  }
}

TEST(Symmetrize, ParseMode) {
  EXPECT_EQ(parse_symmetrize_mode("product"), SymmetrizeMode::product);
  EXPECT_EQ(parse_symmetrize_mode("max"), SymmetrizeMode::max);
  EXPECT_EQ(parse_symmetrize_mode("average"), SymmetrizeMode::average);
  EXPECT_THROW(parse_symmetrize_mode("min"), ParameterError);
}

TEST(KnnGraph, Presets) {
  EXPECT_EQ(kMnistPreset.k, 15u);
  EXPECT_EQ(kMnistPreset.r, 10u);
  EXPECT_EQ(kYaleBPreset.k, 8u);
  EXPECT_EQ(kYaleBPreset.r, 5u);
  EXPECT_EQ(kAttPreset.k, 5u);
  EXPECT_EQ(kAttPreset.r, 3u);
  const auto g = knn_graph(random_cloud(100, 4, 5), kAttPreset.k, kAttPreset.r, SymmetrizeMode::max);
  EXPECT_EQ(g.first_isolated(), g.size());
}
