#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gomk/adam.hpp"
#include "gomk/grad.hpp"
#include "gomk/layer.hpp"
#include "gomk/mlp.hpp"

namespace gomk {

enum class Task { graph, node };
enum class Pooling { max, add, mean };

struct ModelConfig {
  Task task = Task::graph;
  /// Sizes after the input of the front MLP (last entry feeds the first layer); empty for none.
  std::vector<Index> front_sizes;
  /// Layer l+1 reads layer l's responses as node features on the same topology.
  std::vector<LayerConfig> layers;
  Pooling pooling = Pooling::max;
  std::vector<Index> classifier_hidden;
  Index classes = 2;
  double dropout = 0.0;
};

/// Optional front MLP, stacked GOMKCN layers, pooling (graph task) and a classifier MLP.
class GomkcnModel {
 public:
  /// Subgraph plans per layer (layers with identical extraction settings still get their own copy).
  struct Plan {
    std::vector<std::vector<SubgraphPlan>> layers;
  };

  struct Sample {
    const Graphd* graph = nullptr;
    const Plan* plan = nullptr;
    /// Node task: the nodes being classified.
    std::vector<Index> nodes;
    /// Graph task: one label; node task: one label per entry of nodes.
    std::vector<Index> labels;
  };

  struct BatchResult {
    double loss = 0.0;
    Index correct = 0;
    Index count = 0;
    Eigen::MatrixXd logits;
    std::vector<Index> predictions;
  };

  GomkcnModel() = default;
  GomkcnModel(ModelConfig config, Index input_dim, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  Index input_dim() const { return input_dim_; }
  const Mlp& front() const { return front_; }
  Mlp& front() { return front_; }
  const Mlp& classifier() const { return classifier_; }
  Mlp& classifier() { return classifier_; }
  std::vector<GomkcnLayer>& layers() { return layers_; }
  const std::vector<GomkcnLayer>& layers() const { return layers_; }

  Plan plan(const Graphd& g) const;

  /// Mean softmax cross-entropy over the batch; fills `tape` with its gradient when given.
  /// `rng` enables dropout.
  BatchResult loss_classification(std::span<const Sample> batch, std::mt19937_64* rng, int threads,
                                  GradientTape<double>* tape) const;

  BatchResult evaluate(std::span<const Sample> batch, int threads) const {
    return loss_classification(batch, nullptr, threads, nullptr);
  }

  /// n x T responses of one layer (default: last) for every node of g.
  Eigen::MatrixXd responses(const Graphd& g, const Plan& plan, Index layer = -1) const;

  GradientTape<double> zero_tape() const;
  std::vector<ParameterBlock> parameter_blocks();
  std::vector<Eigen::VectorXd> gradient_blocks(const GradientTape<double>& tape) const;
  /// Restores every filter's box constraints.
  void project();
  bool feasible() const;

 private:
  struct SampleTrace;

  ModelConfig config_;
  Index input_dim_ = 0;
  Mlp front_;
  std::vector<GomkcnLayer> layers_;
  Mlp classifier_;
};

}  // namespace gomk
