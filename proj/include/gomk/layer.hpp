#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gomk/filter.hpp"
#include "gomk/grad.hpp"
#include "gomk/graph.hpp"
#include "gomk/omk.hpp"
#include "gomk/tse.hpp"

namespace gomk {

struct LayerConfig {
  Index filters = 4;
  Index filter_nodes = 6;
  Index hops = 1;
  Index t = 2;
  double tau = 1.0;
  /// Standardized subgraph size; 0 means filter_nodes. Filters smaller than
  /// this are padded with fixed isolated zero nodes.
  Index size = 0;
  bool bounded = true;
  /// Emit kappa / (size * (t + 1)) instead of kappa.
  bool normalize = false;
  Truncation truncation = Truncation::deterministic;
  std::uint64_t truncation_seed = 0;

  Index standard_size() const { return size > 0 ? size : filter_nodes; }
  void validate() const;
};

/// Topology of one standardized node-centric subgraph; features are gathered per pass.
struct SubgraphPlan {
  std::vector<Index> nodes;    // real nodes in the parent graph, center first
  Eigen::MatrixXd adjacency;   // size x size, padding rows/cols zero
};

std::vector<SubgraphPlan> plan_subgraphs(const Graphd& g, const LayerConfig& config);

/// Filters materialized (and padded) once per pass.
struct FilterState {
  std::vector<Graphd> graphs;
  std::vector<SubgraphEmbedding<double>> embeddings;
};

/// One convolution: every node-centric subgraph compared against T trainable filters.
///
/// Output row u is z_u = [kappa(G_u, filter_1), ..., kappa(G_u, filter_T)].
class GomkcnLayer {
 public:
  /// Per-graph record of a forward pass.
  struct Trace {
    std::vector<Index> nodes;
    std::vector<SubgraphEmbedding<double>> embeddings;  // one per entry of nodes
    std::vector<Matching<double>> matchings;            // nodes.size() * T, node-major
  };

  GomkcnLayer() = default;
  GomkcnLayer(LayerConfig config, Index feature_dim, std::mt19937_64& rng);

  const LayerConfig& config() const { return config_; }
  Index feature_dim() const { return feature_dim_; }
  Index filter_count() const { return static_cast<Index>(filters_.size()); }
  std::vector<GraphFilter>& filters() { return filters_; }
  const std::vector<GraphFilter>& filters() const { return filters_; }
  double output_scale() const;

  FilterState prepare() const;

  /// n x T responses; rows of nodes not listed are zero.
  Eigen::MatrixXd forward(std::span<const SubgraphPlan> plans, const Eigen::MatrixXd& x,
                          std::span<const Index> nodes, const FilterState& filters,
                          Trace* trace) const;

  /// Accumulates filter level adjoints; returns dLoss/dx (n x d) when need_input, else empty.
  Eigen::MatrixXd backward(std::span<const SubgraphPlan> plans, const Trace& trace,
                           const Eigen::MatrixXd& d_out, const FilterState& filters,
                           std::vector<std::vector<Eigen::MatrixXd>>& filter_adjoints,
                           bool need_input, Index input_rows) const;

  std::vector<std::vector<Eigen::MatrixXd>> zero_filter_adjoints(const FilterState& filters) const;

  /// Turns accumulated level adjoints into gradients of the (unpadded) filter parameters.
  std::vector<FilterGradient<double>> filter_gradients(
      const FilterState& filters,
      const std::vector<std::vector<Eigen::MatrixXd>>& filter_adjoints) const;

 private:
  LayerConfig config_;
  Index feature_dim_ = 0;
  std::vector<GraphFilter> filters_;
};

/// Embedding of a planned subgraph given the current node features.
SubgraphEmbedding<double> embed_subgraph(const SubgraphPlan& plan, const Eigen::MatrixXd& x,
                                         Index t);

}  // namespace gomk
