#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "gomk/checks.hpp"
#include "gomk/feature_map.hpp"
#include "support.hpp"

using namespace gomk;

TEST(ElementKernel, EmptyMatchingIsDiagonal) {
  std::mt19937_64 rng(20);
  const auto x = random_embedding(3, 2, 2, 1.0, rng);
  const auto y = random_embedding(2, 2, 2, 1.0, rng);
  const Eigen::MatrixXd g = element_gram(element_sets(x, y, Matching<double>{}, 1.0));
  Eigen::MatrixXd off = g;
  off.diagonal().setZero();
  EXPECT_TRUE(off.isZero());
  EXPECT_TRUE(g.diagonal().isApproxToConstant(3.0));
}

TEST(ElementKernel, IdentityMatchingBlocks) {
  std::mt19937_64 rng(21);
  const auto x = random_embedding(2, 2, 1, 1.0, rng);
  const Matching<double> id = greedy_match(x, x, 1.0);
  const Eigen::MatrixXd g = element_gram(element_sets(x, x, id, 1.0));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected.diagonal().setConstant(2.0);
  expected(0, 2) = expected(2, 0) = 2.0;
  expected(1, 3) = expected(3, 1) = 2.0;
  EXPECT_TRUE(g.isApprox(expected));
}

TEST(ElementKernel, GramIsPositiveSemidefinite) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_embedding(1 + static_cast<Index>(rng() % 7), 3, 2, 1.5, rng);
    const auto y = random_embedding(1 + static_cast<Index>(rng() % 7), 3, 2, 1.5, rng);
    const auto sets = element_sets(x, y, greedy_match(x, y, 0.7), 0.7);
    const Eigen::MatrixXd g = element_gram(sets);
    const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff();
    EXPECT_GE(e, -1e-8);
  }
}

TEST(FeatureMap, SelfMatchHistogramIntersection) {
  std::mt19937_64 rng(23);
  const auto x = random_embedding(6, 3, 3, 1.0, rng);
  const auto fm = feature_map(element_sets(x, x, greedy_match(x, x, 1.0), 1.0));
  EXPECT_NEAR(fm.histogram_intersection, 24.0, 1e-9);
  EXPECT_NEAR(fm.internal_weight_sum, 24.0, 1e-9);
}

TEST(FeatureMap, TwoLeafClosedForm) {
  ElementSets<double> sets;
  const double t1 = 3.0;  // t + 1 with t = 2
  sets.self_x = Eigen::VectorXd::Constant(1, t1);
  sets.self_y = Eigen::VectorXd::Constant(1, t1);
  sets.matching.pairs.push_back({0, 0, 0.5});
  const auto fm = feature_map(sets);
  ASSERT_EQ(fm.psi.rows(), 2);
  ASSERT_EQ(fm.psi.cols(), 3);
  // columns: leaf x, leaf y, internal node
  EXPECT_NEAR(fm.psi(0, 0), std::sqrt(t1 - 0.5), 1e-12);
  EXPECT_NEAR(fm.psi(1, 1), std::sqrt(t1 - 0.5), 1e-12);
  EXPECT_NEAR(fm.psi(0, 2), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(fm.psi(1, 2), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(fm.psi.row(0).dot(fm.psi.row(1)), 0.5, 1e-12);
}

TEST(FeatureMap, ThreeExpressionsAndKernelAgree) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 6);
    const Graphd a = testing_support::random_weighted_graph(n, 3, 0.5, rng);
    const Graphd b = testing_support::random_weighted_graph(n, 3, 0.5, rng);
    const auto xa = encode(a, 2);
    const auto xb = encode(b, 2);
    const auto k = kernel(xa, xb, 0.9);
    const auto fm = feature_map_oracle(xa, xb, k.matching, 0.9);
    EXPECT_NEAR(fm.histogram_intersection, k.value, 1e-9);
    EXPECT_NEAR(fm.internal_weight_sum, k.value, 1e-9);
    EXPECT_NEAR(fm.matched_similarity_sum, k.value, 1e-9);
    const Eigen::MatrixXd gram = element_gram(element_sets(xa, xb, k.matching, 0.9));
    EXPECT_LT((fm.psi * fm.psi.transpose() - gram).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(FeatureMap, TreeWeightsDecreaseTowardsRoot) {
  std::mt19937_64 rng(25);
  const auto x = random_embedding(4, 2, 2, 1.0, rng);
  const auto y = random_embedding(5, 2, 2, 1.0, rng);
  const auto tree = hierarchical_tree(element_sets(x, y, greedy_match(x, y, 1.0), 1.0));
  for (Index v = 0; v < tree.root(); ++v) {
    EXPECT_GE(tree.weight[static_cast<std::size_t>(v)],
              tree.weight[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(v)])]);
  }
  EXPECT_EQ(tree.node_count(), 4 + 5 + 4 + 1);
}
