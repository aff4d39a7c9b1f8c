#include "gomk/filter.hpp"

#include <algorithm>

namespace gomk {

GraphFilter::GraphFilter(Index nodes, Index feature_dim, bool bounded)
    : nodes_(nodes),
      bounded_(bounded),
      edge_weights_(Eigen::VectorXd::Zero(nodes * (nodes - 1) / 2)),
      features_(Eigen::MatrixXd::Zero(nodes, feature_dim)) {
  if (nodes < 1) throw ConfigError("a filter needs at least one node");
  if (feature_dim < 1) throw ConfigError("a filter needs at least one feature");
}

GraphFilter GraphFilter::random(Index nodes, Index feature_dim, bool bounded, std::mt19937_64& rng) {
  GraphFilter f(nodes, feature_dim, bounded);
  std::uniform_real_distribution<double> weight(0.3, 0.7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index i = 0; i < f.edge_weights_.size(); ++i) f.edge_weights_(i) = weight(rng);
  for (Index c = 0; c < feature_dim; ++c) {
    for (Index r = 0; r < nodes; ++r) f.features_(r, c) = unit(rng);
  }
  return f;
}

GraphFilter GraphFilter::from_graph(const Graphd& g, bool bounded) {
  GraphFilter f(g.size(), g.feature_dim(), bounded);
  Index k = 0;
  for (Index i = 0; i < g.size(); ++i) {
    for (Index j = i + 1; j < g.size(); ++j) f.edge_weights_(k++) = g.adjacency()(i, j);
  }
  f.features_ = g.features();
  return f;
}

Eigen::MatrixXd GraphFilter::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nodes_, nodes_);
  Index k = 0;
  for (Index i = 0; i < nodes_; ++i) {
    for (Index j = i + 1; j < nodes_; ++j) {
      a(i, j) = edge_weights_(k);
      a(j, i) = edge_weights_(k);
      ++k;
    }
  }
  return a;
}

Graphd GraphFilter::graph() const { return Graphd(adjacency(), features_); }

void GraphFilter::project() {
  edge_weights_ = edge_weights_.cwiseMax(0.0).cwiseMin(1.0);
  if (bounded_) features_ = features_.cwiseMax(0.0).cwiseMin(1.0);
}

bool GraphFilter::feasible() const {
  const auto in_unit = [](const auto& m) {
    return m.size() == 0 || (m.minCoeff() >= 0.0 && m.maxCoeff() <= 1.0);
  };
  return in_unit(edge_weights_) && (!bounded_ || in_unit(features_)) && features_.allFinite();
}

Eigen::VectorXd GraphFilter::flatten() const {
  Eigen::VectorXd out(parameter_count());
  out.head(edge_weights_.size()) = edge_weights_;
  out.tail(features_.size()) = features_.reshaped();
  return out;
}

void GraphFilter::assign(const Eigen::VectorXd& params) {
  if (params.size() != parameter_count()) throw ShapeError("filter parameter vector has wrong size");
  edge_weights_ = params.head(edge_weights_.size());
  features_.reshaped() = params.tail(features_.size());
}

Eigen::VectorXd GraphFilter::flatten_gradient(const FilterGradient<double>& g) const {
  if (g.d_adjacency.rows() != nodes_ || g.d_features.rows() != nodes_ ||
      g.d_features.cols() != features_.cols()) {
    throw ShapeError("filter gradient does not match the filter shape");
  }
  Eigen::VectorXd out(parameter_count());
  Index k = 0;
  for (Index i = 0; i < nodes_; ++i) {
    for (Index j = i + 1; j < nodes_; ++j) out(k++) = g.d_adjacency(i, j);
  }
  out.tail(features_.size()) = g.d_features.reshaped();
  return out;
}

}  // namespace gomk
