#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "mwarp/graph.hpp"
#include "mwarp/warping.hpp"
#include "oracles.hpp"

using namespace mwarp;

namespace {

PointCloud line(std::initializer_list<double> xs) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return Matrix::from_rows(rows);
}

// Pairwise distances computed without the library.
Matrix oracle_weights(const PointCloud& cloud) {
  Matrix w(cloud.rows(), cloud.rows());
  for (std::size_t i = 0; i < cloud.rows(); ++i)
    for (std::size_t j = 0; j < cloud.rows(); ++j) w(i, j) = oracle::dist(cloud.row(i), cloud.row(j));
  return w;
}

std::set<std::pair<std::size_t, std::size_t>> pairs(const std::vector<Edge>& edges) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : edges) out.insert({e.i, e.j});
  return out;
}

// Arc length of t -> (t, 2t^2) on [-1, 1], by adaptive quadrature.
double parabola_arc_length() {
  return oracle::adaptive_simpson([](double t) { return std::sqrt(1.0 + 16.0 * t * t); }, -1.0, 1.0);
}

}  // namespace

TEST(CompleteGraph, CollinearExample) {
  const auto g = build_complete_graph(line({0, 1, 3}));
  EXPECT_EQ(g.n, 3u);
  const std::vector<Edge> expected{{0, 1, 1.0}, {0, 2, 3.0}, {1, 2, 2.0}};
  EXPECT_EQ(g.edges, expected);
}

TEST(CompleteGraph, SinglePointHasNoEdges) {
  EXPECT_TRUE(build_complete_graph(line({4})).edges.empty());
}

TEST(CompleteGraph, RandomCloudWeightsMatchPairwiseDistances) {
  std::mt19937_64 rng(3);
  const auto cloud = oracle::random_cloud(rng, 100, 4);
  const auto g = build_complete_graph(cloud);
  ASSERT_EQ(g.edges.size(), 4950u);
  for (const auto& e : g.edges) {
    ASSERT_LT(e.i, e.j);
    EXPECT_DOUBLE_EQ(e.weight, oracle::dist(cloud.row(e.i), cloud.row(e.j)));
  }
}

TEST(Emst, CollinearDropsLongestEdge) {
  const auto tree = compute_emst(build_complete_graph(line({0, 1, 3})));
  EXPECT_EQ(pairs(tree.edges), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
  EXPECT_DOUBLE_EQ(tree.total_weight(), 3.0);
}

TEST(Emst, UnitSquareTieBreakIsLexicographic) {
  const auto square = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto g = build_complete_graph(square);
  const auto tree = compute_emst(g);
  EXPECT_DOUBLE_EQ(tree.total_weight(), oracle::exhaustive_mst_weight(oracle_weights(square)));
  EXPECT_DOUBLE_EQ(tree.total_weight(), 3.0);
  const std::vector<Edge> expected{{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}};
  EXPECT_EQ(tree.edges, expected);
}

TEST(Emst, MatchesExhaustiveEnumerationOnSmallClouds) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cloud = oracle::random_cloud(rng, size(rng), 2 + trial % 2);
    const auto tree = compute_emst(build_complete_graph(cloud));
    ASSERT_EQ(tree.edges.size(), cloud.rows() - 1);
    EXPECT_NEAR(tree.total_weight(), oracle::exhaustive_mst_weight(oracle_weights(cloud)), 1e-12)
        << "trial " << trial;
  }
}

TEST(Emst, EmptyGraphIsUsageError) {
  EXPECT_THROW(compute_emst(WeightedGraph{0, {}}), UsageError);
}

TEST(Emst, DisconnectedGraphReportsComponents) {
  const WeightedGraph g{4, {{0, 1, 1.0}, {2, 3, 1.0}}};
  try {
    compute_emst(g);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("2 components"), std::string::npos) << e.what();
  }
}

TEST(BallRadii, Examples) {
  const auto tree = compute_emst(build_complete_graph(line({0, 1, 3})));
  EXPECT_EQ(ball_radii(tree).radii, (std::vector<double>{1, 2, 2}));
  const auto pair_tree = compute_emst(build_complete_graph(line({0, 5})));
  EXPECT_EQ(ball_radii(pair_tree).radii, (std::vector<double>{5, 5}));
}

TEST(BallRadii, SingleVertexIsUsageError) {
  EXPECT_THROW(ball_radii(SpanningTree{1, {}}), UsageError);
}

TEST(BallRadii, EachRadiusIsTheLongestIncidentEdge) {
  std::mt19937_64 rng(30);
  const auto cloud = oracle::random_cloud(rng, 30, 3);
  const auto tree = compute_emst(build_complete_graph(cloud));
  const auto radii = ball_radii(tree);
  for (std::size_t v = 0; v < 30; ++v) {
    bool attained = false;
    for (const auto& e : tree.edges) {
      if (e.i != v && e.j != v) continue;
      EXPECT_LE(e.weight, radii.radii[v]);
      attained |= e.weight == radii.radii[v];
    }
    EXPECT_TRUE(attained) << "vertex " << v;
    EXPECT_GT(radii.radii[v], 0.0);
  }
}

TEST(KPrime, CollinearExamples) {
  {
    const auto cloud = line({0, 1, 3});
    const auto tree = compute_emst(build_complete_graph(cloud));
    const auto kp = build_kprime(cloud, ball_radii(tree), 1e-9, {}, 1);
    EXPECT_EQ(pairs(kp.edges), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 2}}));
  }
  {
    const auto cloud = line({0, 1, 10});
    const auto tree = compute_emst(build_complete_graph(cloud));
    const std::vector<Edge> expected_tree{{0, 1, 1.0}, {1, 2, 9.0}};
    EXPECT_EQ(tree.edges, expected_tree);
    const auto radii = ball_radii(tree);
    EXPECT_EQ(radii.radii, (std::vector<double>{1, 9, 9}));
    EXPECT_EQ(build_kprime(cloud, radii, 1e-9, {}, 1).edges.size(), 3u);
  }
}

TEST(KPrime, ChordAcrossSemicircleExcluded) {
  // 16 points on a half circle of radius 5: neighbours are ~1.05 apart, so
  // every ball has radius ~1.05 while the diameter chord passes the center,
  // 5 away from every point.
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < 16; ++k) {
    const double a = std::numbers::pi * k / 15.0;
    rows.push_back({5.0 * std::cos(a), 5.0 * std::sin(a)});
  }
  const auto cloud = Matrix::from_rows(rows);
  const auto tree = compute_emst(build_complete_graph(cloud));
  const auto kp = build_kprime(cloud, ball_radii(tree), 1e-9, tree.edges, 1);
  const auto p = pairs(kp.edges);
  for (const auto& e : tree.edges) EXPECT_TRUE(p.count({e.i, e.j}));
  EXPECT_FALSE(p.count({0, 15}));
  EXPECT_LT(kp.edges.size(), 120u);
}

TEST(KPrime, Sim1EdgeCountBetweenTreeAndComplete) {
  const auto cloud = generate_sim1({30, 0.1, false, 42});
  const auto res = geodesic_pipeline(cloud);
  EXPECT_GE(res.kprime.edges.size(), 29u);
  EXPECT_LE(res.kprime.edges.size(), 435u);
  EXPECT_GT(res.kprime.edges.size(), res.tree.edges.size());
  EXPECT_LT(res.kprime.edges.size(), 435u);
}

TEST(KPrime, ParallelMatchesSerial) {
  std::mt19937_64 rng(12);
  const auto cloud = oracle::random_cloud(rng, 80, 3);
  const auto tree = compute_emst(build_complete_graph(cloud));
  const auto radii = ball_radii(tree);
  const auto serial = build_kprime(cloud, radii, 1e-9, tree.edges, 1);
  const auto parallel = build_kprime(cloud, radii, 1e-9, tree.edges, 4);
  EXPECT_EQ(serial.edges, parallel.edges);
}

TEST(ShortestPaths, Examples) {
  const auto cloud = line({0, 1, 3});
  const auto res = geodesic_pipeline(cloud);
  EXPECT_DOUBLE_EQ(res.distances(0, 2), 3.0);

  const WeightedGraph path{3, {{0, 1, 1.0}, {1, 2, 2.0}}};
  EXPECT_DOUBLE_EQ(shortest_path_distances(path)(0, 2), 3.0);
}

TEST(ShortestPaths, DisconnectedGraphIsDataError) {
  const WeightedGraph g{3, {{0, 1, 1.0}}};
  EXPECT_THROW(shortest_path_distances(g), DataError);
}

TEST(ShortestPaths, MatchFloydWarshallOnRandomGraphs) {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::random_connected_graph(rng, size(rng), 0.1);
    const auto got = shortest_path_distances(g, 1 + trial % 3);
    const auto want = oracle::floyd_warshall(g);
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = 0; j < g.n; ++j)
        ASSERT_NEAR(got(i, j), want(i, j), 1e-9 * std::max(1.0, want(i, j)));
  }
}

TEST(ShortestPaths, PathRecordIsConsistent) {
  std::mt19937_64 rng(56);
  const auto g = oracle::random_connected_graph(rng, 25, 0.2);
  const auto dm = shortest_path_distances(g);
  std::map<std::pair<std::size_t, std::size_t>, double> w;
  for (const auto& e : g.edges) {
    w[{e.i, e.j}] = e.weight;
    w[{e.j, e.i}] = e.weight;
  }
  for (std::size_t s = 0; s < g.n; s += 3) {
    for (std::size_t t = 0; t < g.n; t += 4) {
      const auto rec = shortest_path(g, s, t);
      ASSERT_EQ(rec.vertices.front(), s);
      ASSERT_EQ(rec.vertices.back(), t);
      double len = 0.0;
      for (std::size_t k = 1; k < rec.vertices.size(); ++k) {
        const auto it = w.find({rec.vertices[k - 1], rec.vertices[k]});
        ASSERT_NE(it, w.end());
        len += it->second;
      }
      EXPECT_NEAR(len, rec.length, 1e-12 * std::max(1.0, len));
      EXPECT_NEAR(rec.length, dm(s, t), 1e-9 * std::max(1.0, len));
    }
  }
}

TEST(Pipeline, TwoPointsGiveEuclideanDistance) {
  const auto cloud = Matrix::from_rows({{0, 0}, {3, 4}});
  EXPECT_DOUBLE_EQ(geodesic_pipeline(cloud).distances(0, 1), 5.0);
}

TEST(Pipeline, SinglePointGivesZeroMatrix) {
  const auto res = geodesic_pipeline(line({7}));
  EXPECT_TRUE(res.tree.edges.empty());
  ASSERT_EQ(res.distances.rows(), 1u);
  EXPECT_EQ(res.distances(0, 0), 0.0);
}

TEST(Pipeline, EmptyCloudIsUsageError) {
  EXPECT_THROW(geodesic_pipeline(PointCloud{}), UsageError);
}

TEST(Pipeline, NoiselessParabolaEndpointsApproximateArcLength) {
  const double arc = parabola_arc_length();
  EXPECT_NEAR(arc, std::sqrt(17.0) + std::asinh(4.0) / 4.0, 1e-10);
  EXPECT_NEAR(arc, 4.6468, 5e-5);
  const auto cloud = generate_sim1({300, 0.1, true, 1});
  const auto res = geodesic_pipeline(cloud);
  EXPECT_LE(std::abs(res.distances(0, 299) - arc) / arc, 0.05) << res.distances(0, 299);
}

TEST(Pipeline, Sim1KeepsEveryPoint) {
  for (std::size_t n : {10u, 30u, 100u, 300u}) {
    const auto res = geodesic_pipeline(generate_sim1({n, 0.1, false, 2024}));
    EXPECT_EQ(res.kprime.n, n);
    std::vector<char> touched(n, 0);
    for (const auto& e : res.kprime.edges) touched[e.i] = touched[e.j] = 1;
    EXPECT_EQ(std::count(touched.begin(), touched.end(), 1), static_cast<long>(n));
    for (double d : res.distances.data()) EXPECT_TRUE(std::isfinite(d));
  }
}

TEST(Pipeline, DuplicatePointsJoinedByZeroWeightEdge) {
  const auto cloud = Matrix::from_rows({{0, 0}, {0, 0}, {1, 0}});
  const auto res = geodesic_pipeline(cloud);
  EXPECT_EQ(res.distances(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(res.distances(0, 2), 1.0);
}

TEST(PipelineInvariants, TreeEdgesCoveredByTheirOwnBalls) {
  std::mt19937_64 rng(70);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cloud = oracle::random_cloud(rng, 5 + trial, 2 + trial % 3);
    const auto tree = compute_emst(build_complete_graph(cloud));
    const auto radii = ball_radii(tree);
    for (const auto& e : tree.edges) {
      const std::vector<Ball> own{{cloud.row(e.i), radii.radii[e.i]},
                                  {cloud.row(e.j), radii.radii[e.j]}};
      EXPECT_TRUE(segment_covered({cloud.row(e.i), cloud.row(e.j)}, own, 0.0));
    }
  }
}

TEST(PipelineInvariants, MetricAndSandwichBounds) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<std::size_t> size(2, 60);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cloud = oracle::random_cloud(rng, size(rng), 2 + trial % 3);
    const auto res = geodesic_pipeline(cloud);
    const auto tree_paths = shortest_path_distances(res.tree.as_graph());
    const auto& d = res.distances;
    const std::size_t n = cloud.rows();
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(d(i, i), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        ASSERT_EQ(d(i, j), d(j, i));
        const double e = oracle::dist(cloud.row(i), cloud.row(j));
        ASSERT_LE(e, d(i, j) * (1 + 1e-9) + 1e-12);
        ASSERT_LE(d(i, j), tree_paths(i, j) * (1 + 1e-9) + 1e-12);
        for (std::size_t k = 0; k < n; ++k) ASSERT_LE(d(i, k), (d(i, j) + d(j, k)) * (1 + 1e-9));
      }
    }
  }
}

TEST(PipelineInvariants, DeletingNonTreeEdgesNeverShortensPaths) {
  std::mt19937_64 rng(72);
  const auto cloud = oracle::random_cloud(rng, 40, 2);
  const auto res = geodesic_pipeline(cloud);
  const auto tree = pairs(res.tree.edges);
  int removed = 0;
  for (std::size_t k = 0; k < res.kprime.edges.size() && removed < 25; ++k) {
    const auto& e = res.kprime.edges[k];
    if (tree.count({e.i, e.j})) continue;
    WeightedGraph smaller = res.kprime;
    smaller.edges.erase(smaller.edges.begin() + static_cast<std::ptrdiff_t>(k));
    const auto d = shortest_path_distances(smaller);
    for (std::size_t i = 0; i < d.data().size(); ++i) {
      ASSERT_GE(d.data()[i], res.distances.data()[i]);
    }
    ++removed;
  }
  EXPECT_GT(removed, 0);
}

TEST(PipelineInvariants, Deterministic) {
  std::mt19937_64 rng(73);
  const auto cloud = oracle::random_cloud(rng, 70, 3);
  const auto a = geodesic_pipeline(cloud, {-1.0, 1});
  const auto b = geodesic_pipeline(cloud, {-1.0, 3});
  EXPECT_EQ(a.tree.edges, b.tree.edges);
  EXPECT_EQ(a.kprime.edges, b.kprime.edges);
  EXPECT_EQ(a.distances, b.distances);
}

TEST(Diagnostics, EdgeCountsAreOrdered) {
  const auto res = geodesic_pipeline(generate_sim1({50, 0.1, false, 9}));
  const auto d = diagnose(res);
  EXPECT_EQ(d.tree_edges, 49u);
  EXPECT_LE(d.tree_edges, d.kprime_edges);
  EXPECT_LE(d.kprime_edges, d.complete_edges);
  EXPECT_GT(d.radius_fraction, 0.0);
  EXPECT_LE(d.radius_fraction, 1.0);
}
