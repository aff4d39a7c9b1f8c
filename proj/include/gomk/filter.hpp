#pragma once

#include <random>

#include "gomk/grad.hpp"
#include "gomk/graph.hpp"
#include "gomk/types.hpp"

namespace gomk {

/// Trainable graph: tied upper-triangle edge weights and a node feature matrix.
///
/// Edge weights always stay in [0, 1]; features are clamped to [0, 1] only
/// when `bounded` is set. The materialized adjacency is symmetric with a zero
/// diagonal by construction.
class GraphFilter {
 public:
  GraphFilter() = default;
  GraphFilter(Index nodes, Index feature_dim, bool bounded);

  /// Edge weights ~ U(0.3, 0.7), features ~ U(0, 1).
  static GraphFilter random(Index nodes, Index feature_dim, bool bounded, std::mt19937_64& rng);
  static GraphFilter from_graph(const Graphd& g, bool bounded);

  Index size() const { return nodes_; }
  Index feature_dim() const { return features_.cols(); }
  bool bounded() const { return bounded_; }

  /// Upper-triangle weights ordered (0,1), (0,2), ..., (1,2), ...
  Eigen::VectorXd& edge_weights() { return edge_weights_; }
  const Eigen::VectorXd& edge_weights() const { return edge_weights_; }
  Eigen::MatrixXd& features() { return features_; }
  const Eigen::MatrixXd& features() const { return features_; }

  Eigen::MatrixXd adjacency() const;
  Graphd graph() const;

  /// Clamp weights (and bounded features) back into [0, 1].
  void project();
  /// True when the box constraints hold.
  bool feasible() const;

  Index parameter_count() const { return edge_weights_.size() + features_.size(); }
  /// [edge weights..., features (column-major)...]
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& params);
  /// Gradient in flatten() order; reads the upper triangle of the tied adjacency gradient.
  Eigen::VectorXd flatten_gradient(const FilterGradient<double>& g) const;

 private:
  Index nodes_ = 0;
  bool bounded_ = true;
  Eigen::VectorXd edge_weights_;
  Eigen::MatrixXd features_;
};

}  // namespace gomk
