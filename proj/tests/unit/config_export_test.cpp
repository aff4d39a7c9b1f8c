#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "gomk/config.hpp"
#include "gomk/export.hpp"
#include "gomk/isomorphism.hpp"

using namespace gomk;
using nlohmann::json;

TEST(Config, DefaultsRoundTrip) {
  json resolved;
  const MotifClassifyConfig c = resolve_config(MotifClassifyConfig{}, nullptr, {}, resolved);
  EXPECT_EQ(c.layer.filters, 4);
  EXPECT_EQ(c.layer.t, 2);
  EXPECT_DOUBLE_EQ(c.layer.tau, 0.5);
  EXPECT_EQ(c.train.epochs, 200);
  EXPECT_EQ(c.train.batch_size, 512);
  EXPECT_EQ(resolved.at("pooling"), "max");
}

TEST(Config, FileThenOverrides) {
  const json file = {{"epochs", 10}, {"p", {0.2, 0.4}}};
  json resolved;
  const IsoConfig c = resolve_config(IsoConfig{}, &file, {"tau=0.25", "ones_features=true"}, resolved);
  EXPECT_EQ(c.epochs, 10);
  EXPECT_EQ(c.p, (std::vector<double>{0.2, 0.4}));
  EXPECT_DOUBLE_EQ(c.tau, 0.25);
  EXPECT_TRUE(c.ones_features);
  EXPECT_DOUBLE_EQ(resolved.at("tau").get<double>(), 0.25);
}

TEST(Config, NestedOverrideAndStrings) {
  json resolved;
  const GraphClassifyConfig c =
      resolve_config(GraphClassifyConfig{}, nullptr, {"model.layer.hops=2", "model.pooling=mean", "use_grid=true"}, resolved);
  EXPECT_EQ(c.model.layer.hops, 2);
  EXPECT_EQ(c.model.pooling, Pooling::mean);
  ASSERT_TRUE(c.grid.has_value());
  EXPECT_EQ(c.grid->expand(c.model).size(), 4u * 4u * 4u * 3u * 2u * 3u * 2u);
}

TEST(Config, UnknownKeysAreRejected) {
  json resolved;
  EXPECT_THROW(resolve_config(IsoConfig{}, nullptr, {"epoch=3"}, resolved), ConfigError);
  EXPECT_THROW(resolve_config(MotifClassifyConfig{}, nullptr, {"layer.filterz=3"}, resolved), ConfigError);
  const json file = {{"train", {{"momentum", 0.9}}}};
  EXPECT_THROW(resolve_config(MotifClassifyConfig{}, &file, {}, resolved), ConfigError);
  EXPECT_THROW(resolve_config(IsoConfig{}, nullptr, {"novalue"}, resolved), ConfigError);
  EXPECT_THROW(resolve_config(IsoConfig{}, nullptr, {"epochs=many"}, resolved), ConfigError);
  EXPECT_THROW(resolve_config(MotifClassifyConfig{}, nullptr, {"pooling=median"}, resolved), ConfigError);
}

TEST(Export, DotKeepsHeavyEdgesOnly) {
  GraphFilter f(3, 3, true);
  f.edge_weights() << 0.9, 0.2, 0.6;  // (0,1) (0,2) (1,2)
  f.features().setConstant(0.5);
  const std::string dot = filter_dot(f, "f");
  EXPECT_NE(dot.find("0 -- 1"), std::string::npos);
  EXPECT_EQ(dot.find("0 -- 2"), std::string::npos);
  EXPECT_NE(dot.find("1 -- 2"), std::string::npos);
  EXPECT_NE(dot.find("fillcolor=\"#808080\""), std::string::npos);
}

TEST(Export, FilterJsonRoundTrip) {
  std::mt19937_64 rng(60);
  const GraphFilter f = GraphFilter::random(5, 2, false, rng);
  const GraphFilter back = filter_from_json(filter_json(f));
  EXPECT_TRUE(back.flatten().isApprox(f.flatten()));
  EXPECT_EQ(back.bounded(), false);
}

TEST(Export, CheckpointRestoresParameters) {
  ModelConfig mc;
  mc.front_sizes = {4};
  mc.layers = {LayerConfig{.filters = 2, .filter_nodes = 3}};
  mc.classifier_hidden = {5};
  mc.classes = 3;
  GomkcnModel a(mc, 2, 1);
  GomkcnModel b(mc, 2, 2);
  const json cp = checkpoint_json(a, json{{"k", 1}}, 7, 1);
  restore_checkpoint(b, json::parse(cp.dump()));
  const auto pa = a.parameter_blocks();
  const auto pb = b.parameter_blocks();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (Index k = 0; k < pa[i].size; ++k) EXPECT_NEAR(pa[i].data[k], pb[i].data[k], 1e-15);
  }
  ModelConfig other = mc;
  other.layers[0].filters = 3;
  GomkcnModel c(other, 2, 0);
  EXPECT_THROW(restore_checkpoint(c, cp), ShapeError);
}

TEST(Export, CsvQuotesSeparators) {
  const fs::path path = fs::temp_directory_path() / "gomk_test_csv" / "x.csv";
  {
    CsvWriter csv(path, {"a", "b", "c"});
    csv.row(1, 0.5, std::string("x,y"));
    EXPECT_THROW(csv.write({"1"}), ShapeError);
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a,b,c\n1,0.5,\"x,y\"\n");
}

TEST(Isomorphism, FindsRelabelings) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(4, 4);
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = a(2, 3) = a(3, 2) = 1;  // path 0-1-2-3
  Eigen::MatrixXi b = Eigen::MatrixXi::Zero(4, 4);
  b(2, 0) = b(0, 2) = b(0, 3) = b(3, 0) = b(3, 1) = b(1, 3) = 1;  // path 2-0-3-1
  const auto map = find_isomorphism(a, b);
  ASSERT_TRUE(map.has_value());
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(a(i, j), b((*map)[i], (*map)[j]));
  }
  int count = 0;
  for_each_isomorphism(a, b, [&](const std::vector<Index>&) {
    ++count;
    return false;
  });
  EXPECT_EQ(count, 2);  // the path has two automorphisms
  Eigen::MatrixXi star = Eigen::MatrixXi::Zero(4, 4);
  star(0, 1) = star(1, 0) = star(0, 2) = star(2, 0) = star(0, 3) = star(3, 0) = 1;
  EXPECT_FALSE(isomorphic(a, star));
  EXPECT_EQ(threshold_adjacency(Eigen::MatrixXd::Constant(2, 2, 0.6)).sum(), 2);
}
