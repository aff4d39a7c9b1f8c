#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gomk/graph.hpp"

namespace gomk {

namespace fs = std::filesystem;

/// In-memory form of a graph-bundle file: {"n", "edges", "features", "labels"?}.
struct GraphBundle {
  Graphd graph;
  /// Empty when the file has none; one per node or a single graph label otherwise.
  std::vector<Index> labels;
};

GraphBundle parse_graph_bundle(const std::string& text, const std::string& source = "<memory>");
GraphBundle read_graph_bundle(const fs::path& path);
std::string graph_bundle_json(const Graphd& graph, const std::vector<Index>& labels = {});
/// Edges are written for nonzero weights, so weighted graphs lose their weights.
void write_graph_bundle(const fs::path& path, const Graphd& graph,
                        const std::vector<Index>& labels = {});

struct TuDataset {
  std::string name;
  std::vector<Graphd> graphs;
  /// Graph labels remapped to 0..C-1 in ascending order of the raw values.
  std::vector<Index> labels;
  std::vector<long long> raw_labels;
  Index classes = 0;
  Index attribute_dim = 0;
  Index node_label_dim = 0;
  Index edge_count = 0;
};

/// Reads DS_A, DS_graph_indicator, DS_graph_labels and the optional
/// DS_node_labels / DS_node_attributes files. Node features are the attributes
/// followed by a one-hot node label; a constant 1.0 when neither file exists.
/// Edges are undirected (symmetric pairs merged, self-loops dropped).
/// `name` defaults to the prefix of the single *_A.txt file in `dir`.
TuDataset load_tudataset(const fs::path& dir, std::string name = {});

struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  /// DataError unless the three parts are disjoint and within [0, n).
  void validate(Index n) const;
};

Split read_split(const fs::path& path);
void write_split(const fs::path& path, const Split& split);
std::string split_json(const Split& split);

/// Seeded random permutation cut by the given fractions (test takes the rest).
Split random_split(Index n, double train_fraction, double val_fraction, std::uint64_t seed);

/// k outer folds of sizes differing by at most one; within each fold the
/// remaining items are cut 9:1 into train and validation.
std::vector<Split> kfold_splits(Index n_items, Index k, std::uint64_t seed);

struct NodeDataset {
  std::string name;
  Graphd graph;
  std::vector<Index> labels;
  Index classes = 0;
  Split split;
};

/// Manifest JSON: {"name", "graph": bundle path, "labels"?: path to a JSON int
/// array, "split"?: split file path, "split_ratio"?: [train, val, test], "seed"?}.
/// Relative paths resolve against the manifest's directory. Labels come from the
/// labels file or the bundle; a missing label set is a DataError.
NodeDataset load_node_dataset(const fs::path& manifest);

struct GraphDatasetManifest {
  std::string name;
  std::vector<std::string> files;
  std::vector<Index> labels;
  std::vector<std::string> classes;
  Split split;
  std::uint64_t seed = 0;
  Index feature_dim = 0;
};

/// Writes one bundle per graph under dir/graphs plus dir/manifest.json.
void write_graph_dataset(const fs::path& dir, const std::string& name,
                         const std::vector<Graphd>& graphs, const std::vector<Index>& labels,
                         const std::vector<std::string>& classes, const Split& split,
                         std::uint64_t seed);
GraphDatasetManifest read_graph_dataset_manifest(const fs::path& path);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace gomk
