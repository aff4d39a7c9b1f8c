#include <gtest/gtest.h>

#include <set>

#include "gomk/data_io.hpp"
#include "support.hpp"

using namespace gomk;

namespace {

const fs::path kData = GOMK_SOURCE_DIR "/tests/data";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gomk_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Bundle, TinyFixtureParsesExactly) {
  const GraphBundle b = parse_graph_bundle(
      R"({"n": 4, "edges": [[0, 1], [1, 2], [2, 3]], "features": [[1, 0], [0, 1], [1, 1], [0, 0]], "labels": [0, 1, 1, 0]})");
  Eigen::MatrixXd a(4, 4);
  a << 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0;
  EXPECT_TRUE(b.graph.adjacency() == a);
  EXPECT_DOUBLE_EQ(b.graph.features()(2, 1), 1.0);
  EXPECT_EQ(b.labels, (std::vector<Index>{0, 1, 1, 0}));
}

TEST(Bundle, DefaultsAndErrors) {
  const GraphBundle b = parse_graph_bundle(R"({"n": 2, "edges": [[0, 1]]})");
  EXPECT_TRUE(b.graph.features().isOnes());
  EXPECT_EQ(b.graph.feature_dim(), 1);
  EXPECT_THROW(parse_graph_bundle(R"({"n": 2, "edges": [[0, 0]]})"), DataError);
  EXPECT_THROW(parse_graph_bundle(R"({"n": 2, "edges": [[0, 2]]})"), Error);
  EXPECT_THROW(parse_graph_bundle("{not json"), DataError);
  EXPECT_THROW(parse_graph_bundle(R"({"edges": []})"), DataError);
}

TEST(Bundle, RoundTrip) {
  std::mt19937_64 rng(50);
  const Graphd g = testing_support::random_weighted_graph(9, 3, 0.4, rng, true);
  const std::vector<Index> labels{0, 1, 2, 0, 1, 2, 0, 1, 2};
  const fs::path path = scratch("bundle") / "g.json";
  write_graph_bundle(path, g, labels);
  const GraphBundle back = read_graph_bundle(path);
  EXPECT_TRUE(back.graph.adjacency() == g.adjacency());
  EXPECT_LT((back.graph.features() - g.features()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(back.labels, labels);
}

TEST(TuDataset, HandBuiltFixture) {
  const TuDataset ds = load_tudataset(kData / "tu_tiny");
  EXPECT_EQ(ds.name, "TINY");
  ASSERT_EQ(ds.graphs.size(), 2u);
  EXPECT_EQ(ds.raw_labels, (std::vector<long long>{7, 3}));
  EXPECT_EQ(ds.labels, (std::vector<Index>{1, 0}));
  EXPECT_EQ(ds.classes, 2);
  EXPECT_EQ(ds.attribute_dim, 2);
  EXPECT_EQ(ds.node_label_dim, 3);
  EXPECT_EQ(ds.edge_count, 4);

  // handwritten expectation: triangle with features [attributes | one-hot label]
  Eigen::MatrixXd a0(3, 3);
  a0 << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  Eigen::MatrixXd f0(3, 5);
  f0 << 0.5, 1.0, 1, 0, 0,
        0.25, 2.0, 0, 1, 0,
        1.5, 0.0, 1, 0, 0;
  EXPECT_TRUE(ds.graphs[0].adjacency() == a0);
  EXPECT_TRUE(ds.graphs[0].features().isApprox(f0));
  Eigen::MatrixXd a1(2, 2);
  a1 << 0, 1, 1, 0;
  Eigen::MatrixXd f1(2, 5);
  f1 << -1.0, 3.0, 0, 0, 1,
        2.0, 2.0, 0, 1, 0;
  EXPECT_TRUE(ds.graphs[1].adjacency() == a1);
  EXPECT_TRUE(ds.graphs[1].features().isApprox(f1));
}

TEST(TuDataset, MutagCounts) {
  const TuDataset ds = load_tudataset(kData / "MUTAG");
  EXPECT_EQ(ds.graphs.size(), 188u);
  EXPECT_EQ(ds.classes, 2);
  EXPECT_EQ(ds.node_label_dim, 7);
  EXPECT_EQ(ds.edge_count, 3721);
  Index nodes = 0;
  for (const Graphd& g : ds.graphs) nodes += g.size();
  EXPECT_EQ(nodes, 3371);
  EXPECT_EQ(ds.graphs.front().size(), 17);
  EXPECT_EQ(std::count(ds.labels.begin(), ds.labels.end(), 1), 125);
}

TEST(TuDataset, MalformedFilesReportTheLine) {
  const fs::path dir = scratch("tu_bad");
  fs::copy(kData / "tu_tiny", dir, fs::copy_options::recursive);
  write_text(dir / "TINY_A.txt", "1, 2\n2, 4\n");
  try {
    load_tudataset(dir);
    FAIL() << "cross-graph edge accepted";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  write_text(dir / "TINY_A.txt", "1, 9\n");
  EXPECT_THROW(load_tudataset(dir), ParseError);
  write_text(dir / "TINY_A.txt", "1, 2\n");
  write_text(dir / "TINY_graph_indicator.txt", "1\n2\n1\n2\n2\n");
  EXPECT_THROW(load_tudataset(dir), ParseError);
}

TEST(Splits, KfoldSingletonsAndSizes) {
  const auto ten = kfold_splits(10, 10, 0);
  ASSERT_EQ(ten.size(), 10u);
  for (const Split& s : ten) EXPECT_EQ(s.test.size(), 1u);

  const auto folds = kfold_splits(600, 10, 3);
  std::set<Index> all;
  for (const Split& s : folds) {
    EXPECT_EQ(s.test.size(), 60u);
    EXPECT_NO_THROW(s.validate(600));
    EXPECT_EQ(s.train.size() + s.val.size(), 540u);
    EXPECT_EQ(s.val.size(), 54u);
    all.insert(s.test.begin(), s.test.end());
  }
  EXPECT_EQ(all.size(), 600u);

  const auto uneven = kfold_splits(23, 5, 1);
  std::size_t lo = 100, hi = 0;
  for (const Split& s : uneven) {
    lo = std::min(lo, s.test.size());
    hi = std::max(hi, s.test.size());
  }
  EXPECT_LE(hi - lo, 1u);
  EXPECT_THROW(kfold_splits(3, 5, 0), ConfigError);
}

TEST(Splits, FileRoundTripAndValidation) {
  const Split s = random_split(50, 0.6, 0.2, 9);
  EXPECT_EQ(s.train.size(), 30u);
  EXPECT_EQ(s.val.size(), 10u);
  EXPECT_EQ(s.test.size(), 10u);
  const fs::path path = scratch("split") / "split.json";
  write_split(path, s);
  const Split back = read_split(path);
  EXPECT_EQ(back.train, s.train);
  EXPECT_EQ(back.test, s.test);
  Split bad = s;
  bad.test.push_back(bad.train.front());
  EXPECT_THROW(bad.validate(50), DataError);
}

TEST(NodeDataset, ManifestWithBundleLabels) {
  const fs::path dir = scratch("node_ds");
  std::mt19937_64 rng(51);
  const Graphd g = testing_support::random_weighted_graph(20, 4, 0.3, rng, true);
  std::vector<Index> labels;
  for (Index i = 0; i < 20; ++i) labels.push_back(i % 3);
  write_graph_bundle(dir / "graph.json", g, labels);
  write_text(dir / "manifest.json", R"({"name": "toy", "graph": "graph.json", "seed": 4})");
  const NodeDataset ds = load_node_dataset(dir / "manifest.json");
  EXPECT_EQ(ds.name, "toy");
  EXPECT_EQ(ds.classes, 3);
  EXPECT_EQ(ds.split.train.size(), 12u);
  EXPECT_EQ(ds.split.val.size(), 4u);
  EXPECT_EQ(ds.split.test.size(), 4u);

  write_graph_bundle(dir / "unlabelled.json", g);
  write_text(dir / "bad.json", R"({"name": "toy", "graph": "unlabelled.json"})");
  EXPECT_THROW(load_node_dataset(dir / "bad.json"), DataError);
}

TEST(GraphDataset, ManifestRoundTrip) {
  const fs::path dir = scratch("graph_ds");
  std::mt19937_64 rng(52);
  std::vector<Graphd> graphs;
  for (int i = 0; i < 5; ++i) graphs.push_back(testing_support::random_weighted_graph(4 + i, 2, 0.5, rng, true));
  const std::vector<Index> labels{0, 1, 0, 1, 1};
  const Split split = random_split(5, 0.6, 0.2, 0);
  write_graph_dataset(dir, "toy", graphs, labels, {"a", "b"}, split, 3);
  const GraphDatasetManifest m = read_graph_dataset_manifest(dir / "manifest.json");
  EXPECT_EQ(m.name, "toy");
  EXPECT_EQ(m.files.size(), 5u);
  EXPECT_EQ(m.labels, labels);
  EXPECT_EQ(m.split.test, split.test);
}
