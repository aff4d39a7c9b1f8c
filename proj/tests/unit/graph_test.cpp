#include <gtest/gtest.h>

#include <set>

#include "gomk/graph.hpp"
#include "gomk/omk.hpp"
#include "gomk/synth.hpp"
#include "support.hpp"

using namespace gomk;
using testing_support::hop_distances;

namespace {

Graphd path5() {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  Eigen::MatrixXd f(5, 2);
  f << 1, 0, 2, 0, 3, 0, 4, 0, 5, 0;
  return Graphd::from_edges(5, e, f);
}

}  // namespace

TEST(Graph, RejectsAsymmetricAndSelfLoops) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 1) = 1.0;
  EXPECT_THROW(Graphd(a, Eigen::MatrixXd::Ones(3, 1)), Error);
  a(1, 0) = 1.0;
  a(2, 2) = 1.0;
  EXPECT_THROW(Graphd(a, Eigen::MatrixXd::Ones(3, 1)), Error);
  const std::vector<Edge> loop{{1, 1}};
  EXPECT_THROW(Graphd::from_edges(3, loop, Eigen::MatrixXd::Ones(3, 1)), InvariantError);
  const std::vector<Edge> outside{{0, 3}};
  EXPECT_THROW(Graphd::from_edges(3, outside, Eigen::MatrixXd::Ones(3, 1)), IndexError);
}

TEST(Graph, PathCenterOneHop) {
  const Graphd g = path5();
  const auto s = extract_subgraph(g, 2, 1, 3);
  EXPECT_EQ(s.real_node_count, 3);
  EXPECT_EQ(s.graph.node_ids(), (std::vector<Index>{2, 1, 3}));
  EXPECT_DOUBLE_EQ(s.graph.adjacency()(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.graph.adjacency()(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(s.graph.adjacency()(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(s.graph.features()(0, 0), 3.0);
}

TEST(Graph, PathEndIsPaddedAndSelfSimilarityHolds) {
  const Graphd g = path5();
  const auto s = extract_subgraph(g, 0, 1, 3);
  EXPECT_EQ(s.real_node_count, 2);
  EXPECT_EQ(s.graph.size(), 3);
  EXPECT_EQ(s.graph.node_ids()[2], -1);
  EXPECT_TRUE(s.graph.features().row(2).isZero());
  EXPECT_TRUE(s.graph.adjacency().row(2).isZero());
  for (Index t : {0, 1, 2, 3}) {
    EXPECT_NEAR(kernel(s.graph, s.graph, t, 0.7).value, 3.0 * static_cast<double>(t + 1), 1e-12);
  }
}

TEST(Graph, BallMatchesRelaxationOracleOnPlantedGraph) {
  PatternGraphConfig cfg;
  cfg.seed = 3;
  const PlantedGraph pg = pattern_mining_graph(cfg);
  const Graphd& g = pg.graph;
  ASSERT_EQ(g.size(), 1000);
  const Eigen::MatrixXd& a = g.adjacency();
  for (Index u = 0; u < g.size(); u += 7) {
    const std::vector<Index> dist = hop_distances(a, u);
    const auto ball = bfs_ball(g, u, 3);
    Index within = 0;
    for (Index d : dist) within += (d >= 0 && d <= 3) ? 1 : 0;
    ASSERT_EQ(static_cast<Index>(ball.size()), within) << "center " << u;
    for (const BallNode& b : ball) ASSERT_EQ(b.hop, dist[static_cast<std::size_t>(b.node)]);
    for (std::size_t i = 1; i < ball.size(); ++i) ASSERT_LE(ball[i - 1].hop, ball[i].hop);
    const Index m = 6;
    const auto s = extract_subgraph(g, u, 3, m);
    ASSERT_EQ(s.real_node_count, std::min(within, m));
    ASSERT_EQ(s.graph.node_ids().front(), u);
  }
}

TEST(Graph, InducedEdgesMatchDoubleLoop) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Graphd g = testing_support::random_weighted_graph(10, 1, 0.4, rng);
    std::vector<Index> nodes;
    for (Index v = 0; v < 10; ++v) {
      if (rng() % 2) nodes.push_back(v);
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::vector<Edge> expected;
    for (Index u : nodes) {
      for (Index v : nodes) {
        if (u < v && g.adjacency()(u, v) != 0.0) expected.push_back({u, v});
      }
    }
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(induced_edges(g, std::span<const Index>(nodes)), expected);
  }
}

TEST(Graph, InducedEdgesTrivialCases) {
  const std::vector<Edge> tri{{0, 1}, {1, 2}, {0, 2}};
  const Graphd g = Graphd::from_edges(3, tri, Eigen::MatrixXd::Ones(3, 1));
  const std::vector<Index> two{0, 1};
  EXPECT_EQ(induced_edges(g, std::span<const Index>(two)), (std::vector<Edge>{{0, 1}}));
  EXPECT_TRUE(induced_edges(g, std::span<const Index>()).empty());
  const std::vector<Index> dup{0, 0};
  EXPECT_THROW(induced_edges(g, std::span<const Index>(dup)), IndexError);
}

TEST(Graph, DeterministicTruncationKeepsNearestHops) {
  // star with center 0 and leaves 1..5, leaf 5 extended by a tail 6-7
  const std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {5, 6}, {6, 7}};
  const Graphd g = Graphd::from_edges(8, e, Eigen::MatrixXd::Ones(8, 1));
  const auto nodes = subgraph_nodes(g, 0, ExtractionOptions{3, 4});
  EXPECT_EQ(nodes, (std::vector<Index>{0, 1, 2, 3}));
}

TEST(Graph, SeededTruncationIsReproducibleAndDropsOuterHopFirst) {
  const std::vector<Edge> e{{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}};
  const Graphd g = Graphd::from_edges(7, e, Eigen::MatrixXd::Ones(7, 1));
  const ExtractionOptions opt{2, 5, Truncation::seeded_random, 42};
  const auto a = subgraph_nodes(g, 0, opt);
  const auto b = subgraph_nodes(g, 0, opt);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 5u);
  const std::set<Index> kept(a.begin(), a.end());
  EXPECT_TRUE(kept.count(0) && kept.count(1) && kept.count(2));
}

TEST(Graph, ExtractionValidatesArguments) {
  const Graphd g = path5();
  EXPECT_THROW(extract_subgraph(g, 7, 1, 3), IndexError);
  EXPECT_THROW(extract_subgraph(g, 0, 0, 3), ConfigError);
  EXPECT_THROW(extract_subgraph(g, 0, 1, 0), ConfigError);
  EXPECT_THROW(pad_graph(g, 3), ShapeError);
}
