#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gomk/errors.hpp"
#include "gomk/types.hpp"

namespace gomk {

/// Undirected edge between two node indices, stored with u < v.
struct Edge {
  Index u = 0;
  Index v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph with dense adjacency and node features.
///
/// The adjacency is exactly symmetric with a zero diagonal and weights in
/// [0, 1]. Data graphs carry {0, 1} weights; graph filters may carry any
/// weight in the interval. Instances are immutable once constructed.
template <typename Scalar>
class Graph {
 public:
  using Matrix = MatrixX<Scalar>;

  Graph() = default;

  Graph(Matrix adjacency, Matrix features, std::vector<Index> node_ids = {})
      : adjacency_(std::move(adjacency)),
        features_(std::move(features)),
        node_ids_(std::move(node_ids)) {
    validate();
    build_neighbors();
  }

  /// Binary symmetric adjacency from an edge list.
  static Graph from_edges(Index n, std::span<const Edge> edges, Matrix features) {
    Matrix adjacency = Matrix::Zero(n, n);
    for (const Edge& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
        throw IndexError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") outside a graph of " + std::to_string(n) + " nodes");
      }
      if (e.u == e.v) throw InvariantError("self-loop on node " + std::to_string(e.u));
      adjacency(e.u, e.v) = Scalar(1);
      adjacency(e.v, e.u) = Scalar(1);
    }
    return Graph(std::move(adjacency), std::move(features));
  }

  Index size() const { return adjacency_.rows(); }
  Index feature_dim() const { return features_.cols(); }

  const Matrix& adjacency() const { return adjacency_; }
  const Matrix& features() const { return features_; }

  /// Original-graph index of each node; empty when the graph is not derived from another.
  const std::vector<Index>& node_ids() const { return node_ids_; }

  /// Nodes joined to v by a nonzero weight, ascending.
  const std::vector<Index>& neighbors(Index v) const {
    return neighbors_[static_cast<std::size_t>(v)];
  }

  /// Edges with nonzero weight, u < v, in row-major order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Index u = 0; u < size(); ++u) {
      for (Index v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  /// Same topology with replaced node features.
  Graph with_features(Matrix features) const {
    return Graph(adjacency_, std::move(features), node_ids_);
  }

 private:
  void validate() const {
    const Index n = adjacency_.rows();
    if (adjacency_.cols() != n) {
      throw ShapeError("adjacency must be square, got " + std::to_string(n) + "x" +
                       std::to_string(adjacency_.cols()));
    }
    if (features_.rows() != n) {
      throw ShapeError("feature matrix has " + std::to_string(features_.rows()) +
                       " rows for a graph of " + std::to_string(n) + " nodes");
    }
    if (!node_ids_.empty() && static_cast<Index>(node_ids_.size()) != n) {
      throw ShapeError("node_ids length does not match node count");
    }
    for (Index i = 0; i < n; ++i) {
      if (adjacency_(i, i) != Scalar(0)) {
        throw InvariantError("nonzero diagonal entry at node " + std::to_string(i));
      }
      for (Index j = i + 1; j < n; ++j) {
        const Scalar a = adjacency_(i, j);
        if (a != adjacency_(j, i)) {
          throw InvariantError("adjacency is not symmetric at (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
        }
        if (!(a >= Scalar(0) && a <= Scalar(1))) {
          throw InvariantError("adjacency weight outside [0,1] at (" + std::to_string(i) +
                               "," + std::to_string(j) + ")");
        }
      }
    }
  }

  void build_neighbors() {
    const Index n = adjacency_.rows();
    neighbors_.assign(static_cast<std::size_t>(n), {});
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (adjacency_(i, j) != Scalar(0)) neighbors_[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }

  Matrix adjacency_;
  Matrix features_;
  std::vector<Index> node_ids_;
  std::vector<std::vector<Index>> neighbors_;
};

using Graphd = Graph<double>;

/// Edges of g with both endpoints in `nodes`, reported in original indices with u < v, sorted.
template <typename Scalar>
std::vector<Edge> induced_edges(const Graph<Scalar>& g, std::span<const Index> nodes) {
  std::vector<char> member(static_cast<std::size_t>(g.size()), 0);
  for (Index v : nodes) {
    if (v < 0 || v >= g.size()) throw IndexError("node " + std::to_string(v) + " out of range");
    auto& flag = member[static_cast<std::size_t>(v)];
    if (flag) throw IndexError("duplicate node " + std::to_string(v));
    flag = 1;
  }
  std::vector<Edge> out;
  for (Index u : nodes) {
    for (Index v : g.neighbors(u)) {
      if (u < v && member[static_cast<std::size_t>(v)]) out.push_back({u, v});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Node reached by breadth-first search together with its hop distance.
struct BallNode {
  Index node = 0;
  Index hop = 0;
};

/// Nodes within `hops` of u in BFS discovery order (neighbors visited ascending); u first.
template <typename Scalar>
std::vector<BallNode> bfs_ball(const Graph<Scalar>& g, Index u, Index hops) {
  std::vector<Index> dist(static_cast<std::size_t>(g.size()), -1);
  std::vector<BallNode> order{{u, 0}};
  dist[static_cast<std::size_t>(u)] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const BallNode cur = order[head];
    if (cur.hop == hops) continue;
    for (Index v : g.neighbors(cur.node)) {
      auto& d = dist[static_cast<std::size_t>(v)];
      if (d < 0) {
        d = cur.hop + 1;
        order.push_back({v, d});
      }
    }
  }
  return order;
}

enum class Truncation {
  /// Drop nodes in reverse discovery order (farthest, latest-discovered first).
  deterministic,
  /// Drop uniformly random nodes from the outermost remaining hop.
  seeded_random,
};

struct ExtractionOptions {
  Index hops = 1;
  Index size = 1;
  Truncation policy = Truncation::deterministic;
  std::uint64_t seed = 0;
};

/// k-hop subgraph around a center node, standardized to a fixed node count.
///
/// Node 0 is the center, the remaining real nodes follow BFS discovery order,
/// and indices >= real_node_count are isolated zero-feature padding.
template <typename Scalar>
struct NodeCentricSubgraph {
  Index center = 0;
  Graph<Scalar> graph;
  Index hop_radius = 0;
  Index real_node_count = 0;
};

/// Parent-graph indices of the real nodes kept for the subgraph around u (center first).
template <typename Scalar>
std::vector<Index> subgraph_nodes(const Graph<Scalar>& g, Index u, const ExtractionOptions& opt) {
  if (u < 0 || u >= g.size()) {
    throw IndexError("center " + std::to_string(u) + " outside a graph of " +
                     std::to_string(g.size()) + " nodes");
  }
  if (opt.size < 1) throw ConfigError("subgraph size must be at least 1");
  if (opt.hops < 1) throw ConfigError("hop radius must be at least 1");

  std::vector<BallNode> ball = bfs_ball(g, u, opt.hops);
  const auto keep = static_cast<std::size_t>(opt.size);
  if (ball.size() > keep && opt.policy == Truncation::seeded_random) {
    std::mt19937_64 rng(opt.seed ^ (static_cast<std::uint64_t>(u) * 0x9E3779B97F4A7C15ULL));
    std::vector<char> dropped(ball.size(), 0);
    std::size_t remaining = ball.size();
    Index hop = ball.back().hop;
    while (remaining > keep) {
      std::vector<std::size_t> outer;
      for (std::size_t i = 1; i < ball.size(); ++i) {
        if (!dropped[i] && ball[i].hop == hop) outer.push_back(i);
      }
      if (outer.empty()) {
        --hop;
        continue;
      }
      std::uniform_int_distribution<std::size_t> pick(0, outer.size() - 1);
      dropped[outer[pick(rng)]] = 1;
      --remaining;
    }
    std::vector<BallNode> kept;
    for (std::size_t i = 0; i < ball.size(); ++i) {
      if (!dropped[i]) kept.push_back(ball[i]);
    }
    ball = std::move(kept);
  }
  if (ball.size() > keep) ball.resize(keep);

  std::vector<Index> nodes;
  nodes.reserve(ball.size());
  for (const BallNode& b : ball) nodes.push_back(b.node);
  return nodes;
}

/// Induced subgraph on `nodes` (in the given order), padded with isolated zero-feature nodes up to `size`.
template <typename Scalar>
Graph<Scalar> induced_subgraph(const Graph<Scalar>& g, std::span<const Index> nodes, Index size) {
  const auto real = static_cast<Index>(nodes.size());
  if (real > size) throw ShapeError("more nodes than the standardized size");
  MatrixX<Scalar> adjacency = MatrixX<Scalar>::Zero(size, size);
  MatrixX<Scalar> features = MatrixX<Scalar>::Zero(size, g.feature_dim());
  std::vector<Index> ids(static_cast<std::size_t>(size), -1);
  for (Index i = 0; i < real; ++i) {
    const Index vi = nodes[static_cast<std::size_t>(i)];
    features.row(i) = g.features().row(vi);
    ids[static_cast<std::size_t>(i)] = vi;
    for (Index j = i + 1; j < real; ++j) {
      const Scalar a = g.adjacency()(vi, nodes[static_cast<std::size_t>(j)]);
      adjacency(i, j) = a;
      adjacency(j, i) = a;
    }
  }
  return Graph<Scalar>(std::move(adjacency), std::move(features), std::move(ids));
}

/// k-hop node-centric subgraph of u standardized to opt.size nodes.
template <typename Scalar>
NodeCentricSubgraph<Scalar> extract_subgraph(const Graph<Scalar>& g, Index u,
                                             const ExtractionOptions& opt) {
  const std::vector<Index> nodes = subgraph_nodes(g, u, opt);
  return {u, induced_subgraph(g, std::span<const Index>(nodes), opt.size), opt.hops,
          static_cast<Index>(nodes.size())};
}

template <typename Scalar>
NodeCentricSubgraph<Scalar> extract_subgraph(const Graph<Scalar>& g, Index u, Index hops,
                                             Index size,
                                             Truncation policy = Truncation::deterministic,
                                             std::uint64_t seed = 0) {
  return extract_subgraph(g, u, ExtractionOptions{hops, size, policy, seed});
}

/// Appends isolated zero-feature nodes so that g has exactly `size` nodes.
template <typename Scalar>
Graph<Scalar> pad_graph(const Graph<Scalar>& g, Index size) {
  if (g.size() > size) {
    throw ShapeError("cannot pad a graph of " + std::to_string(g.size()) + " nodes to " +
                     std::to_string(size));
  }
  if (g.size() == size) return g;
  MatrixX<Scalar> adjacency = MatrixX<Scalar>::Zero(size, size);
  adjacency.topLeftCorner(g.size(), g.size()) = g.adjacency();
  MatrixX<Scalar> features = MatrixX<Scalar>::Zero(size, g.feature_dim());
  features.topRows(g.size()) = g.features();
  return Graph<Scalar>(std::move(adjacency), std::move(features));
}

}  // namespace gomk
