#include <gtest/gtest.h>

#include "gomk/experiments.hpp"
#include "gomk/isomorphism.hpp"
#include "gomk/omk.hpp"
#include "gomk/train.hpp"
#include "support.hpp"

using namespace gomk;

TEST(Adam, ZeroGradientLeavesParameters) {
  std::mt19937_64 rng(40);
  std::vector<GraphFilter> filters{GraphFilter::random(4, 2, true, rng)};
  const Eigen::VectorXd before = filters[0].flatten();
  GradientTape<double> tape;
  tape.filters.push_back(FilterGradient<double>::zero(4, 2));
  AdamOptimizer opt(AdamConfig{0.5});
  adam_step(std::span<GraphFilter>(filters), tape, opt);
  EXPECT_TRUE(filters[0].flatten().isApprox(before));
}

TEST(Adam, ProjectionHoldsTheBox) {
  GraphFilter f(3, 1, true);
  f.edge_weights().setConstant(1.0);
  f.features().setConstant(0.0);
  std::vector<GraphFilter> filters{f};
  GradientTape<double> tape;
  // loss gradient negative: descent pushes the parameters upwards
  tape.filters.push_back({-Eigen::MatrixXd::Ones(3, 3), Eigen::MatrixXd::Ones(3, 1)});
  tape.filters[0].d_adjacency.diagonal().setZero();
  AdamOptimizer opt(AdamConfig{0.5});
  for (int i = 0; i < 5; ++i) adam_step(std::span<GraphFilter>(filters), tape, opt);
  EXPECT_TRUE(filters[0].edge_weights().isApproxToConstant(1.0));
  EXPECT_TRUE(filters[0].features().isZero());
  EXPECT_TRUE(filters[0].feasible());
}

TEST(Adam, NonFiniteGradientIsReported) {
  std::vector<double> x{1.0};
  AdamOptimizer opt;
  const std::vector<ParameterBlock> p{{x.data(), 1}};
  const std::vector<Eigen::VectorXd> g{Eigen::VectorXd::Constant(1, std::nan(""))};
  EXPECT_THROW(opt.step(p, g, "probe"), TrainingError);
}

TEST(TrainIso, KappaNonDecreasingInMostSeededRuns) {
  int monotone = 0;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const Graphd target = testing_support::random_weighted_graph(6, 3, 0.5, rng, true);
    const TrainConfig c{.epochs = 60, .learning_rate = 0.001};
    const IsoTrainResult r = train_iso(target, GraphFilter::random(6, 3, true, rng), 3, 1.0, c);
    bool ok = true;
    for (std::size_t e = 1; e < r.kappa.size(); ++e) ok = ok && r.kappa[e] >= r.kappa[e - 1] - 1e-9;
    monotone += ok ? 1 : 0;
  }
  EXPECT_GE(monotone, 48);
}

TEST(TrainIso, KappaNeverDropsWhileTheMatchingHolds) {
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const Graphd target = testing_support::random_weighted_graph(6, 3, 0.5, rng, true);
    GraphFilter f = GraphFilter::random(6, 3, true, rng);
    AdamOptimizer opt(TrainConfig{.epochs = 60, .learning_rate = 0.001}.adam());
    auto prev = kernel(target, f.graph(), 3, 1.0, Matcher::greedy);
    for (int e = 0; e < 60; ++e) {
      adam_step(std::span<GraphFilter>(&f, 1), loss_iso(target, f, 3, 1.0).tape, opt);
      auto cur = kernel(target, f.graph(), 3, 1.0, Matcher::greedy);
      bool same = cur.matching.pairs.size() == prev.matching.pairs.size();
      for (std::size_t i = 0; same && i < cur.matching.pairs.size(); ++i) {
        same = cur.matching.pairs[i].x == prev.matching.pairs[i].x && cur.matching.pairs[i].y == prev.matching.pairs[i].y;
      }
      if (same) {
        EXPECT_GE(cur.value, prev.value - 1e-9) << "seed " << seed << " epoch " << e;
      }
      prev = std::move(cur);
    }
  }
}

TEST(TrainIso, RecoversMostGraphsAtModerateRate) {
  IsoConfig cfg;
  cfg.p = {0.5};
  cfg.learning_rate = 0.02;
  const IsoReport r = run_iso_learning(cfg);
  EXPECT_GE(r.recovered, 9);
  EXPECT_LT(r.max_mae, 0.05);
}

TEST(TrainIso, EmptyGraphIsRecovered) {
  IsoConfig cfg;
  cfg.p = {0.0};
  cfg.seeds = 2;
  cfg.epochs = 300;
  cfg.learning_rate = 0.02;
  const IsoReport r = run_iso_learning(cfg);
  EXPECT_EQ(r.recovered, 2);
  for (const IsoRun& run : r.runs) EXPECT_EQ(threshold_adjacency(run.filter.adjacency()).sum(), 0);
}

TEST(TrainClassifier, LearnsASeparableTaskAndRestoresTheBestEpoch) {
  // class 0: triangles, class 1: paths; constant features so only structure separates them
  std::vector<Graphd> graphs;
  std::vector<Index> labels;
  const std::vector<Edge> tri{{0, 1}, {1, 2}, {0, 2}};
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  for (int i = 0; i < 20; ++i) {
    graphs.push_back(Graphd::from_edges(3, i % 2 ? path : tri, Eigen::MatrixXd::Constant(3, 1, 0.5)));
    labels.push_back(i % 2);
  }
  ModelConfig mc;
  mc.layers = {LayerConfig{.filters = 2, .filter_nodes = 3, .hops = 1, .t = 2, .tau = 1.0}};
  mc.pooling = Pooling::mean;
  mc.classes = 2;
  GomkcnModel model(mc, 1, 0);
  std::vector<GomkcnModel::Plan> plans;
  for (const Graphd& g : graphs) plans.push_back(model.plan(g));
  std::vector<GomkcnModel::Sample> train, val;
  for (int i = 0; i < 20; ++i) (i < 16 ? train : val).push_back({&graphs[i], &plans[i], {}, {labels[i]}});
  const TrainConfig c{.epochs = 60, .learning_rate = 0.05, .batch_size = 4};
  const ClassifierTrainResult r = train_classifier(model, train, val, c);
  ASSERT_EQ(r.history.size(), 60u);
  EXPECT_DOUBLE_EQ(r.best_val_accuracy, 1.0);
  for (int e = 0; e < r.best_epoch; ++e) EXPECT_LT(r.history[static_cast<std::size_t>(e)].val_accuracy, 1.0);
  const auto eval = model.evaluate(val, 1);
  EXPECT_EQ(eval.correct, eval.count);
}

TEST(Losses, UniformLogitsGiveLogC) {
  const Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(3, 5);
  const std::vector<Index> labels{0, 2, 4};
  EXPECT_NEAR(softmax_cross_entropy(logits, labels).loss, std::log(5.0), 1e-12);
}

TEST(Layer, FilterIdenticalToSubgraphRespondsWithTheBound) {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}};
  const Graphd g = Graphd::from_edges(4, e, Eigen::MatrixXd::Constant(4, 2, 0.3));
  const LayerConfig cfg{.filters = 1, .filter_nodes = 4, .hops = 3, .t = 2, .tau = 1.0};
  std::mt19937_64 rng(0);
  GomkcnLayer layer(cfg, 2, rng);
  const auto plans = plan_subgraphs(g, cfg);
  // filter = the subgraph around node 0, in its planned order
  Eigen::MatrixXd f(4, 2);
  for (std::size_t i = 0; i < plans[0].nodes.size(); ++i) f.row(static_cast<Index>(i)) = g.features().row(plans[0].nodes[i]);
  layer.filters()[0] = GraphFilter::from_graph(Graphd(plans[0].adjacency, f), true);
  const std::vector<Index> nodes{0, 1, 2, 3};
  const Eigen::MatrixXd z = layer.forward(plans, g.features(), nodes, layer.prepare(), nullptr);
  EXPECT_NEAR(z(0, 0), 12.0, 1e-12);
  // every center sees the whole path, so every response hits the bound
  for (Index u = 1; u < 4; ++u) EXPECT_NEAR(z(u, 0), 12.0, 1e-12);
}
