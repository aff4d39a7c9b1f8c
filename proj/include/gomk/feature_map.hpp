#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gomk/errors.hpp"
#include "gomk/omk.hpp"
#include "gomk/types.hpp"

namespace gomk {

/// Self-similarities and matched pairs of two element sets X and Y.
///
/// Elements are numbered X first (0..p-1) then Y (p..p+q-1) in every
/// structure below.
template <typename Scalar>
struct ElementSets {
  VectorX<Scalar> self_x;
  VectorX<Scalar> self_y;
  Matching<Scalar> matching;

  Index p() const { return self_x.size(); }
  Index q() const { return self_y.size(); }
};

/// Element sets of two subgraph embeddings; pair similarities are recomputed from the embeddings.
template <typename Scalar>
ElementSets<Scalar> element_sets(const SubgraphEmbedding<Scalar>& x_emb,
                                 const SubgraphEmbedding<Scalar>& y_emb,
                                 const Matching<Scalar>& matching, Scalar tau) {
  check_width(tau);
  check_compatible(x_emb, y_emb);
  ElementSets<Scalar> sets;
  sets.self_x.resize(x_emb.node_count());
  sets.self_y.resize(y_emb.node_count());
  for (Index i = 0; i < x_emb.node_count(); ++i) sets.self_x(i) = node_similarity(x_emb, i, x_emb, i, tau);
  for (Index i = 0; i < y_emb.node_count(); ++i) sets.self_y(i) = node_similarity(y_emb, i, y_emb, i, tau);
  matching.validate(x_emb.node_count(), y_emb.node_count());
  sets.matching = matching;
  for (auto& pair : sets.matching.pairs) {
    pair.similarity = node_similarity(x_emb, pair.x, y_emb, pair.y, tau);
  }
  return sets;
}

/// Gram matrix of the element kernel: self-similarities on the diagonal,
/// matched similarities at matched pairs, zero elsewhere.
template <typename Scalar>
MatrixX<Scalar> element_gram(const ElementSets<Scalar>& sets) {
  const Index p = sets.p();
  const Index n = p + sets.q();
  sets.matching.validate(p, sets.q());
  MatrixX<Scalar> gram = MatrixX<Scalar>::Zero(n, n);
  gram.diagonal().head(p) = sets.self_x;
  gram.diagonal().tail(sets.q()) = sets.self_y;
  for (const auto& pair : sets.matching.pairs) {
    gram(pair.x, p + pair.y) = pair.similarity;
    gram(p + pair.y, pair.x) = pair.similarity;
  }
  return gram;
}

template <typename Scalar>
MatrixX<Scalar> element_gram(const SubgraphEmbedding<Scalar>& x_emb,
                             const SubgraphEmbedding<Scalar>& y_emb,
                             const Matching<Scalar>& matching, Scalar tau) {
  return element_gram(element_sets(x_emb, y_emb, matching, tau));
}

/// Tree whose lowest-common-ancestor weights reproduce the element kernel.
///
/// Nodes 0..p+q-1 are the leaves (one per element), followed by one internal
/// node per matched pair, and the root last. Root weight is 0.
template <typename Scalar>
struct HierarchicalTree {
  std::vector<Index> parent;  // -1 for the root
  std::vector<Scalar> weight;
  Index leaf_count = 0;

  Index root() const { return static_cast<Index>(parent.size()) - 1; }
  Index node_count() const { return static_cast<Index>(parent.size()); }
  bool is_internal(Index v) const { return v >= leaf_count && v != root(); }

  Index lca(Index a, Index b) const {
    std::vector<char> on_path(parent.size(), 0);
    for (Index v = a; v >= 0; v = parent[static_cast<std::size_t>(v)]) on_path[static_cast<std::size_t>(v)] = 1;
    for (Index v = b; v >= 0; v = parent[static_cast<std::size_t>(v)]) {
      if (on_path[static_cast<std::size_t>(v)]) return v;
    }
    return root();
  }
};

template <typename Scalar>
HierarchicalTree<Scalar> hierarchical_tree(const ElementSets<Scalar>& sets) {
  const Index p = sets.p();
  const Index leaves = p + sets.q();
  const auto internal = static_cast<Index>(sets.matching.pairs.size());
  sets.matching.validate(p, sets.q());

  HierarchicalTree<Scalar> tree;
  tree.leaf_count = leaves;
  const Index root = leaves + internal;
  tree.parent.assign(static_cast<std::size_t>(root + 1), root);
  tree.weight.assign(static_cast<std::size_t>(root + 1), Scalar(0));
  tree.parent[static_cast<std::size_t>(root)] = -1;
  for (Index i = 0; i < p; ++i) tree.weight[static_cast<std::size_t>(i)] = sets.self_x(i);
  for (Index i = 0; i < sets.q(); ++i) tree.weight[static_cast<std::size_t>(p + i)] = sets.self_y(i);
  for (Index k = 0; k < internal; ++k) {
    const auto& pair = sets.matching.pairs[static_cast<std::size_t>(k)];
    const Index node = leaves + k;
    tree.weight[static_cast<std::size_t>(node)] = pair.similarity;
    tree.parent[static_cast<std::size_t>(pair.x)] = node;
    tree.parent[static_cast<std::size_t>(p + pair.y)] = node;
  }
  for (Index v = 0; v < root; ++v) {
    const Scalar w = tree.weight[static_cast<std::size_t>(v)];
    const Scalar wp = tree.weight[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(v)])];
    if (w < wp) {
      throw InvariantError("tree weight of node " + std::to_string(v) +
                           " is below its parent's weight");
    }
  }
  return tree;
}

/// Explicit feature map of the element kernel and the derived set embeddings.
template <typename Scalar>
struct FeatureMapVectors {
  /// Row e is psi(e); columns are the non-root tree nodes (2 min(p,q) + max(p,q) of them).
  MatrixX<Scalar> psi;
  VectorX<Scalar> delta_x;
  VectorX<Scalar> delta_y;
  /// sum_i min(delta_x[i]^2, delta_y[i]^2)
  Scalar histogram_intersection = Scalar(0);
  /// Sum of internal-node weights.
  Scalar internal_weight_sum = Scalar(0);
  /// Sum of matched pair similarities.
  Scalar matched_similarity_sum = Scalar(0);
  HierarchicalTree<Scalar> tree;
};

template <typename Scalar>
FeatureMapVectors<Scalar> feature_map(const ElementSets<Scalar>& sets) {
  FeatureMapVectors<Scalar> out;
  out.tree = hierarchical_tree(sets);
  const auto& tree = out.tree;
  const Index p = sets.p();
  const Index leaves = tree.leaf_count;
  const Index dim = tree.root();

  out.psi = MatrixX<Scalar>::Zero(leaves, dim);
  for (Index e = 0; e < leaves; ++e) {
    for (Index v = e; v != tree.root(); v = tree.parent[static_cast<std::size_t>(v)]) {
      const Scalar w = tree.weight[static_cast<std::size_t>(v)];
      const Scalar wp = tree.weight[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(v)])];
      out.psi(e, v) = std::sqrt(w - wp);
    }
  }
  out.delta_x = out.psi.topRows(p).colwise().sum().transpose();
  out.delta_y = out.psi.bottomRows(sets.q()).colwise().sum().transpose();
  out.histogram_intersection =
      out.delta_x.array().square().min(out.delta_y.array().square()).sum();
  for (Index v = leaves; v < tree.root(); ++v) {
    out.internal_weight_sum += tree.weight[static_cast<std::size_t>(v)];
  }
  out.matched_similarity_sum = sets.matching.total();
  return out;
}

template <typename Scalar>
FeatureMapVectors<Scalar> feature_map_oracle(const SubgraphEmbedding<Scalar>& x_emb,
                                             const SubgraphEmbedding<Scalar>& y_emb,
                                             const Matching<Scalar>& matching, Scalar tau) {
  return feature_map(element_sets(x_emb, y_emb, matching, tau));
}

}  // namespace gomk
