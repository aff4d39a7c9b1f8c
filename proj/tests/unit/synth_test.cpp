#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

#include "gomk/isomorphism.hpp"
#include "gomk/synth.hpp"

using namespace gomk;

namespace {

nlohmann::json golden_motifs() {
  std::ifstream in(GOMK_SOURCE_DIR "/data/motifs/motifs.json");
  return nlohmann::json::parse(in);
}

Index edge_count(const Graphd& g) {
  Index e = 0;
  for (Index u = 0; u < g.size(); ++u) {
    for (Index v = u + 1; v < g.size(); ++v) e += g.adjacency()(u, v) != 0.0 ? 1 : 0;
  }
  return e;
}

}  // namespace

TEST(Motifs, LibraryMatchesGoldenFile) {
  const auto golden = golden_motifs();
  ASSERT_EQ(golden.at("motifs").size(), motif_library().size());
  for (const auto& m : golden.at("motifs")) {
    const MotifSpec& spec = motif(m.at("name").get<std::string>());
    EXPECT_EQ(spec.nodes, m.at("nodes").get<Index>());
    std::set<std::pair<Index, Index>> expected, actual;
    for (const auto& e : m.at("edges")) expected.insert({e[0].get<Index>(), e[1].get<Index>()});
    for (const Edge& e : spec.edges) actual.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
    EXPECT_EQ(actual, expected) << spec.name;
    EXPECT_NO_THROW(spec.validate());
  }
}

TEST(Motifs, LookupIsCaseInsensitive) {
  EXPECT_EQ(motif("house").name, "House");
  EXPECT_THROW(motif("Pentagram"), ConfigError);
}

TEST(Motifs, PlantedKindsArePairwiseNonIsomorphic) {
  const std::vector<std::string> names{"House", "Cup", "Wheel", "Crown", "Book", "Circle"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      EXPECT_FALSE(isomorphic(motif(names[i]).adjacency(), motif(names[j]).adjacency())) << names[i] << " " << names[j];
    }
  }
}

TEST(BarabasiAlbert, ThreeNodesFormATree) {
  const BarabasiAlbert ba = barabasi_albert(3, 1, 2, std::uint64_t{1});
  EXPECT_EQ(edge_count(ba.graph), 2);
}

TEST(BarabasiAlbert, EdgeCountMatchesLedger) {
  for (Index m = 1; m <= 3; ++m) {
    const BarabasiAlbert ba = barabasi_albert(760, m, 3, std::uint64_t{7});
    Index ledger = ba.core_edges;
    for (Index e : ba.attached_edges) ledger += e;
    EXPECT_EQ(edge_count(ba.graph), ledger);
    EXPECT_EQ(ledger, m * (760 - m));
    EXPECT_EQ(ba.graph.size(), 760);
    EXPECT_TRUE((ba.graph.features().array() >= 0.0).all() && (ba.graph.features().array() <= 1.0).all());
  }
}

TEST(BarabasiAlbert, DegreesAreHeavyTailed) {
  const BarabasiAlbert ba = barabasi_albert(760, 1, 1, std::uint64_t{3});
  std::vector<Index> deg;
  for (Index v = 0; v < 760; ++v) deg.push_back(static_cast<Index>(ba.graph.neighbors(v).size()));
  std::sort(deg.begin(), deg.end());
  const double mean = 2.0 * 759.0 / 760.0;
  // most nodes are leaves while a few hubs reach many times the mean degree
  EXPECT_GT(std::count(deg.begin(), deg.end(), 1), 760 / 3);
  EXPECT_GT(static_cast<double>(deg.back()), 10.0 * mean);
}

TEST(AttachMotif, CountsAndInducedEdges) {
  const BarabasiAlbert ba = barabasi_albert(760, 1, 3, std::uint64_t{5});
  std::mt19937_64 rng(5);
  const MotifSpec& house = motif("House");
  const AttachedMotif r = attach_motif(ba.graph, house, rng);
  EXPECT_EQ(r.graph.size(), 766);
  EXPECT_EQ(edge_count(r.graph), edge_count(ba.graph) + static_cast<Index>(house.edges.size()) + 1);
  std::vector<Index> nodes;
  for (Index i = 0; i < 6; ++i) nodes.push_back(r.first_node + i);
  std::vector<Edge> expected;
  for (const Edge& e : house.edges) expected.push_back({r.first_node + std::min(e.u, e.v), r.first_node + std::max(e.u, e.v)});
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(induced_edges(r.graph, std::span<const Index>(nodes)), expected);
}

TEST(PatternGraph, ThousandNodesWithTenCopiesEach) {
  const PlantedGraph pg = pattern_mining_graph(PatternGraphConfig{});
  EXPECT_EQ(pg.graph.size(), 1000);
  std::map<Index, Index> per_kind;
  for (Index k : pg.motif_of) ++per_kind[k];
  EXPECT_EQ(per_kind[-1], 760);
  for (Index k = 0; k < 4; ++k) EXPECT_EQ(per_kind[k], 60);
}

TEST(MotifDataset, SizesBalanceAndSplits) {
  MotifDatasetConfig cfg;
  const MotifDataset ds = build_motif_classification_dataset(cfg);
  ASSERT_EQ(ds.graphs.size(), 8000u);
  std::map<Index, Index> per_class;
  for (Index y : ds.labels) ++per_class[y];
  for (Index c = 0; c < 4; ++c) EXPECT_EQ(per_class[c], 2000);
  EXPECT_EQ(ds.train.size(), 6400u);
  EXPECT_EQ(ds.val.size(), 800u);
  EXPECT_EQ(ds.test.size(), 800u);
  std::set<Index> all(ds.train.begin(), ds.train.end());
  all.insert(ds.val.begin(), ds.val.end());
  all.insert(ds.test.begin(), ds.test.end());
  EXPECT_EQ(all.size(), 8000u);
  for (std::size_t i = 0; i < ds.graphs.size(); i += 97) {
    const MotifSpec& m = motif(ds.classes[static_cast<std::size_t>(ds.labels[i])]);
    EXPECT_EQ(ds.graphs[i].size(), 25 + m.nodes);
    EXPECT_EQ(ds.motif_start[i], 25);
  }
}

TEST(MotifDataset, Deterministic) {
  MotifDatasetConfig cfg;
  cfg.count = 40;
  const MotifDataset a = build_motif_classification_dataset(cfg);
  const MotifDataset b = build_motif_classification_dataset(cfg);
  for (std::size_t i = 0; i < a.graphs.size(); ++i) {
    EXPECT_TRUE(a.graphs[i].adjacency() == b.graphs[i].adjacency());
    EXPECT_TRUE(a.graphs[i].features() == b.graphs[i].features());
  }
  EXPECT_EQ(a.test, b.test);
}
