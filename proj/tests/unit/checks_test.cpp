#include <gtest/gtest.h>

#include "gomk/checks.hpp"
#include "gomk/experiments.hpp"
#include "support.hpp"

using namespace gomk;

TEST(Checks, BruteForceAgreesWithRecursiveEnumeration) {
  std::mt19937_64 rng(70);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd s(1 + trial % 5, 1 + (trial / 5) % 6);
    for (Index k = 0; k < s.size(); ++k) s.data()[k] = u(rng);
    EXPECT_NEAR(brute_force_assignment(s), testing_support::best_injection(s), 1e-12);
  }
}

TEST(Checks, SuitePassesOnSmallSizes) {
  for (const CheckResult& r : {check_self_similarity(30, 1), check_element_kernel(30, 2), check_matching(60, 3),
                               check_gradients(5, 4), check_reconstruction(10, 5)}) {
    EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
  }
}

TEST(Checks, KrylovRankDetectsIsolatedTwins) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = a(1, 0) = 1.0;
  const Graphd g(a, Eigen::MatrixXd::Ones(4, 1));
  EXPECT_LT(krylov_rank(g, 3), 4);
}

TEST(Experiments, MeanStddev) {
  const auto [m, s] = mean_stddev({1.0, 3.0});
  EXPECT_DOUBLE_EQ(m, 2.0);
  EXPECT_DOUBLE_EQ(s, 1.0);
}

TEST(Experiments, PatternMiningSmokeRun) {
  PatternConfig cfg;
  cfg.graph.base_nodes = 60;
  cfg.graph.copies = 1;
  cfg.epochs = 5;
  const PatternReport r = run_pattern_mining(cfg);
  EXPECT_EQ(r.graph.graph.size(), 84);
  EXPECT_EQ(r.filters.size(), 8u);
  EXPECT_EQ(r.loss.size(), 5u);
  Index total = 0;
  for (Index c : r.counts) total += c;
  EXPECT_EQ(total, 84);
  for (const GraphFilter& f : r.filters) EXPECT_TRUE(f.feasible());
}

TEST(Experiments, MotifClassificationSmokeRun) {
  MotifClassifyConfig cfg;
  cfg.data.count = 40;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 8;
  const MotifClassifyReport r = run_motif_classification(cfg);
  EXPECT_EQ(r.training.history.size(), 2u);
  EXPECT_GE(r.test_accuracy, 0.0);
  EXPECT_LE(r.test_accuracy, 1.0);
  EXPECT_FALSE(r.responses.empty());
  for (const ResponseRow& row : r.responses) EXPECT_EQ(row.in_motif, row.node >= 25);
}

TEST(Experiments, GraphClassificationOnMutagFolds) {
  GraphDataset ds = graph_dataset(load_tudataset(GOMK_SOURCE_DIR "/tests/data/MUTAG"));
  ds.graphs.resize(40);
  ds.labels.resize(40);
  GraphClassifyConfig cfg;
  cfg.folds = 4;
  cfg.train.epochs = 2;
  cfg.model.layer.filter_nodes = 4;
  cfg.model.layer.filters = 2;
  const GraphClassifyReport r = run_graph_classification(ds, cfg);
  EXPECT_EQ(r.folds.size(), 4u);
  for (const FoldResult& f : r.folds) {
    EXPECT_GE(f.test_accuracy, 0.0);
    EXPECT_LE(f.test_accuracy, 1.0);
  }
}

TEST(Experiments, NodeClassificationSmokeRun) {
  std::mt19937_64 rng(71);
  NodeDataset ds;
  ds.name = "toy";
  ds.graph = testing_support::random_weighted_graph(30, 4, 0.2, rng, true);
  for (Index i = 0; i < 30; ++i) ds.labels.push_back(i % 2);
  ds.classes = 2;
  ds.split = random_split(30, 0.6, 0.2, 0);
  NodeClassifyConfig cfg;
  cfg.front_dim = 4;
  cfg.layer.filter_nodes = 4;
  cfg.train.epochs = 3;
  cfg.train.batch_size = 8;
  cfg.seeds = {0, 1};
  const NodeClassifyReport r = run_node_classification(ds, cfg);
  EXPECT_EQ(r.runs.size(), 2u);
  for (const NodeRun& run : r.runs) EXPECT_EQ(run.training.history.size(), 3u);
}
