#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gomk/data_io.hpp"
#include "gomk/filter.hpp"
#include "gomk/layer.hpp"
#include "gomk/model.hpp"
#include "gomk/synth.hpp"
#include "gomk/train.hpp"

namespace gomk {

// ---------------------------------------------------------------- iso learning

struct IsoConfig {
  Index nodes = 6;
  Index feature_dim = 3;
  std::vector<double> p{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int seeds = 10;
  int epochs = 500;
  double learning_rate = 0.5;
  Index t = 3;
  double tau = 1.0;
  /// Structure-only variant: every node feature is 1.
  bool ones_features = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IsoRun {
  double p = 0.0;
  int replicate = 0;
  Graphd target;
  GraphFilter filter;
  std::vector<double> kappa;
  /// Thresholded filter adjacency isomorphic to the target.
  bool recovered = false;
  /// Smallest mean |feature difference| over the isomorphisms; NaN when not recovered.
  double feature_mae = 0.0;
};

struct IsoSummary {
  double p = 0.0;
  int runs = 0;
  int recovered = 0;
  double mean_mae = 0.0;  // over recovered runs
};

struct IsoReport {
  std::vector<IsoRun> runs;
  std::vector<IsoSummary> per_p;
  double recovery_rate = 0.0;
  double mean_mae = 0.0;
  double max_mae = 0.0;
  int recovered = 0;
  /// Recovered runs whose final kappa is within 1% of m (t + 1).
  int kappa_near_bound = 0;
};

/// Best feature MAE over every isomorphism between the thresholded filter and the
/// target, or nullopt when the two are not isomorphic.
std::optional<double> recovery_error(const Graphd& target, const GraphFilter& filter);

/// Ground truth for (p, replicate): Bernoulli(p) edges, U(0,1) or all-ones features.
Graphd iso_target(const IsoConfig& config, double p, int replicate);

IsoReport run_iso_learning(const IsoConfig& config, int threads = 1);

// -------------------------------------------------------------- pattern mining

struct PatternConfig {
  PatternGraphConfig graph;
  Index filters = 8;
  Index filter_nodes = 6;
  Index hops = 3;
  Index t = 3;
  double tau = 1.0;
  /// Standardized subgraph size; 0 means filter_nodes.
  Index size = 0;
  int epochs = 500;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PatternReport {
  PlantedGraph graph;
  std::vector<GraphFilter> filters;
  std::vector<double> loss;
  std::vector<Index> assignment;
  std::vector<Index> counts;
  /// Per filter: the planted motif its thresholded adjacency is isomorphic to, or empty.
  std::vector<std::string> matched;
  /// Distinct planted motifs matched by some filter, in planted order.
  std::vector<std::string> recovered;
};

PatternReport run_pattern_mining(const PatternConfig& config, int threads = 1);

// ------------------------------------------------------- motif classification

struct MotifClassifyConfig {
  MotifDatasetConfig data;
  LayerConfig layer{.filters = 4, .filter_nodes = 6, .hops = 3, .t = 2, .tau = 0.5};
  Pooling pooling = Pooling::max;
  std::vector<Index> classifier_hidden;
  TrainConfig train{.epochs = 200, .learning_rate = 0.1, .batch_size = 512};
  /// Test graphs per class whose node responses are reported.
  Index response_graphs = 1;

  void validate() const;
};

struct ResponseRow {
  Index graph = 0;
  Index label = 0;
  Index node = 0;
  bool in_motif = false;
  Index filter = 0;
  double kappa = 0.0;
};

struct MotifClassifyReport {
  MotifDataset dataset;
  GomkcnModel model;
  ClassifierTrainResult training;
  double test_accuracy = 0.0;
  std::vector<ResponseRow> responses;
};

MotifClassifyReport run_motif_classification(
    const MotifClassifyConfig& config, int threads = 1,
    const std::function<void(const EpochMetrics&)>& on_epoch = {});

// -------------------------------------------------------- node classification

struct NodeClassifyConfig {
  /// Front MLP output dimension; 0 for none.
  Index front_dim = 32;
  LayerConfig layer{.filters = 5, .filter_nodes = 8, .hops = 1, .t = 2, .tau = 0.6};
  std::vector<Index> classifier_hidden;
  double dropout = 0.0;
  TrainConfig train{.epochs = 200, .learning_rate = 0.06, .batch_size = 512};
  /// One training run per seed on the dataset split.
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  void validate() const;
};

struct NodeRun {
  std::uint64_t seed = 0;
  ClassifierTrainResult training;
  double test_accuracy = 0.0;
};

struct NodeClassifyReport {
  std::vector<NodeRun> runs;
  double mean = 0.0;
  double stddev = 0.0;
};

NodeClassifyReport run_node_classification(
    const NodeDataset& dataset, const NodeClassifyConfig& config, int threads = 1,
    const std::function<void(std::size_t, const EpochMetrics&)>& on_epoch = {});

// ------------------------------------------------------- graph classification

struct GraphModelConfig {
  Index front_dim = 16;
  LayerConfig layer{.filters = 8, .filter_nodes = 8, .hops = 1, .t = 2, .tau = 1.0};
  Pooling pooling = Pooling::add;
  std::vector<Index> classifier_hidden{32};
  double dropout = 0.0;
};

/// Axes of the model-selection grid; the product of all lists is searched.
struct GraphGrid {
  std::vector<Index> filters{3, 4, 8, 16};
  std::vector<Index> filter_nodes{4, 8, 10, 16};
  std::vector<Index> front_dim{4, 8, 16, 32};
  std::vector<double> dropout{0.0, 0.2, 0.4};
  std::vector<Index> hops{1, 2};
  std::vector<Index> t{1, 2, 3};
  std::vector<Pooling> pooling{Pooling::add, Pooling::mean};

  std::vector<GraphModelConfig> expand(const GraphModelConfig& base) const;
};

struct GraphClassifyConfig {
  GraphModelConfig model;
  /// When set, every fold selects the grid point with the best validation accuracy.
  std::optional<GraphGrid> grid;
  TrainConfig train{.epochs = 300, .learning_rate = 0.01, .batch_size = 128};
  Index folds = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FoldResult {
  Index fold = 0;
  GraphModelConfig selected;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct GraphClassifyReport {
  std::vector<FoldResult> folds;
  double mean = 0.0;
  double stddev = 0.0;
};

struct GraphDataset {
  std::string name;
  std::vector<Graphd> graphs;
  std::vector<Index> labels;
  Index classes = 0;
};

GraphDataset graph_dataset(TuDataset tu);

GraphClassifyReport run_graph_classification(
    const GraphDataset& dataset, const GraphClassifyConfig& config, int threads = 1,
    const std::function<void(Index fold, std::size_t candidate, const EpochMetrics&)>& on_epoch = {});

/// Population mean and standard deviation.
std::pair<double, double> mean_stddev(const std::vector<double>& values);

}  // namespace gomk
