#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gomk/graph.hpp"

namespace gomk {

/// Growth record of a preferential-attachment graph.
struct BarabasiAlbert {
  Graphd graph;
  Index core_nodes = 0;
  Index core_edges = 0;
  /// Edges added by each node after the core, in insertion order.
  std::vector<Index> attached_edges;
};

/// Preferential attachment: a star on attach_m + 1 nodes, then each new node
/// links to attach_m distinct existing nodes chosen proportionally to degree.
/// Features ~ U(0, 1)^feature_dim.
BarabasiAlbert barabasi_albert(Index n, Index attach_m, Index feature_dim, std::mt19937_64& rng);
BarabasiAlbert barabasi_albert(Index n, Index attach_m, Index feature_dim, std::uint64_t seed);

struct MotifSpec {
  std::string name;
  Index nodes = 0;
  std::vector<Edge> edges;

  Eigen::MatrixXi adjacency() const;
  /// Connected, at most 8 nodes, edges valid and unique.
  void validate() const;
};

/// House, Cup, Wheel, Crown, Book, Diamond, Circle, Email.
const std::vector<MotifSpec>& motif_library();
/// Case-insensitive lookup; ConfigError for unknown names.
const MotifSpec& motif(std::string_view name);

struct AttachedMotif {
  Graphd graph;
  /// Index of the motif's node 0 in the result; motif node i sits at first_node + i.
  Index first_node = 0;
  Edge bridge;
};

/// Appends the motif with U(0, 1) features and joins a uniform base node to a
/// uniform motif node by one bridge edge. The base endpoint is drawn from the
/// first `anchor_count` nodes (all of them when negative).
AttachedMotif attach_motif(const Graphd& base, const MotifSpec& motif, std::mt19937_64& rng,
                           Index anchor_count = -1);

struct PlantedGraph {
  Graphd graph;
  /// Per node: index into `motifs` of the planted kind it belongs to, or -1 for base nodes.
  std::vector<Index> motif_of;
  std::vector<std::string> motifs;
  std::vector<Index> base_nodes;
};

struct PatternGraphConfig {
  Index base_nodes = 760;
  Index attach_m = 1;
  Index copies = 10;
  Index feature_dim = 3;
  std::vector<std::string> motifs{"House", "Cup", "Wheel", "Crown"};
  std::uint64_t seed = 0;
};

/// Base BA graph with `copies` planted instances of every motif, attached in
/// round-robin motif order.
PlantedGraph pattern_mining_graph(const PatternGraphConfig& config);

struct MotifDatasetConfig {
  Index count = 8000;
  Index base_nodes = 25;
  Index attach_m = 1;
  Index feature_dim = 3;
  std::vector<std::string> motifs{"Book", "Diamond", "Circle", "Email"};
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct MotifDataset {
  std::vector<Graphd> graphs;
  std::vector<Index> labels;
  /// Per graph: index of the first motif node (motif nodes are contiguous at the end).
  std::vector<Index> motif_start;
  std::vector<std::string> classes;
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;
};

/// count / classes graphs per motif kind; splits stratified by class.
MotifDataset build_motif_classification_dataset(const MotifDatasetConfig& config);

/// Per-class shuffled split into train/val/test by the given fractions (test takes the rest).
void stratified_split(std::span<const Index> labels, double train_fraction, double val_fraction,
                      std::uint64_t seed, std::vector<Index>& train, std::vector<Index>& val,
                      std::vector<Index>& test);

}  // namespace gomk
