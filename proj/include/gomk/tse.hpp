#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gomk/errors.hpp"
#include "gomk/graph.hpp"
#include "gomk/types.hpp"

namespace gomk {

/// Multi-level embedding of the subtree rooted at one node; row i is the level-i vector.
template <typename Scalar>
struct SubtreeEmbedding {
  MatrixX<Scalar> levels;

  Index depth() const { return levels.rows() - 1; }
  Index feature_dim() const { return levels.cols(); }
};

/// Subtree embeddings of every node of a graph, stored level-major.
///
/// level(i) is the n x d matrix A^i F, so node v's level-i vector is row v of
/// level(i). Level 0 is the raw feature matrix.
template <typename Scalar>
class SubgraphEmbedding {
 public:
  SubgraphEmbedding() = default;
  explicit SubgraphEmbedding(std::vector<MatrixX<Scalar>> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw ShapeError("an embedding needs at least one level");
    for (const auto& l : levels_) {
      if (l.rows() != levels_.front().rows() || l.cols() != levels_.front().cols()) {
        throw ShapeError("embedding levels disagree in shape");
      }
    }
  }

  Index node_count() const { return levels_.front().rows(); }
  Index feature_dim() const { return levels_.front().cols(); }
  /// Number of aggregation steps t (levels 0..t are stored).
  Index depth() const { return static_cast<Index>(levels_.size()) - 1; }

  const MatrixX<Scalar>& level(Index i) const { return levels_[static_cast<std::size_t>(i)]; }
  const std::vector<MatrixX<Scalar>>& levels() const { return levels_; }

  SubtreeEmbedding<Scalar> node(Index v) const {
    MatrixX<Scalar> out(depth() + 1, feature_dim());
    for (Index i = 0; i <= depth(); ++i) out.row(i) = level(i).row(v);
    return {std::move(out)};
  }

 private:
  std::vector<MatrixX<Scalar>> levels_;
};

/// Level embeddings A^i F for i = 0..t by iterated multiplication.
template <typename Scalar>
SubgraphEmbedding<Scalar> encode(const MatrixX<Scalar>& adjacency, const MatrixX<Scalar>& features,
                                 Index t) {
  if (t < 0) throw ConfigError("aggregation steps must be non-negative");
  if (adjacency.rows() != features.rows()) throw ShapeError("adjacency/feature row mismatch");
  std::vector<MatrixX<Scalar>> levels;
  levels.reserve(static_cast<std::size_t>(t + 1));
  levels.push_back(features);
  for (Index i = 1; i <= t; ++i) levels.push_back(adjacency * levels.back());
  return SubgraphEmbedding<Scalar>(std::move(levels));
}

template <typename Scalar>
SubgraphEmbedding<Scalar> encode(const Graph<Scalar>& g, Index t) {
  return encode(g.adjacency(), g.features(), t);
}

/// Outcome of solving A * (A^i F) = A^(i+1) F for the adjacency.
template <typename Scalar>
struct AdjacencyReconstruction {
  /// Numerical rank of the stacked levels [F, AF, ..., A^(t-1) F].
  Index rank = 0;
  /// Max abs residual of the recovered adjacency over all level equations.
  Scalar residual = Scalar(0);
  /// Set only when the system has full rank and the residual is within tolerance.
  std::optional<MatrixX<Scalar>> adjacency;

  bool full_rank() const { return adjacency.has_value(); }
};

/// Recovers the unique symmetric adjacency reproducing an embedding's levels.
///
/// Needs rank([c_0, ..., c_{t-1}]) == n; otherwise the result has no adjacency
/// and reports the deficient rank. Columns are rescaled to unit norm before the
/// solve, which leaves A unchanged since A (C S) = D S.
template <typename Scalar>
AdjacencyReconstruction<Scalar> reconstruct_adjacency(const SubgraphEmbedding<Scalar>& emb,
                                                      Scalar tolerance = Scalar(1e-8)) {
  const Index n = emb.node_count();
  const Index d = emb.feature_dim();
  const Index t = emb.depth();
  if (t < 1) throw ConfigError("reconstruction needs at least one aggregation step");

  MatrixX<Scalar> lhs(n, t * d);
  MatrixX<Scalar> rhs(n, t * d);
  for (Index i = 0; i < t; ++i) {
    lhs.middleCols(i * d, d) = emb.level(i);
    rhs.middleCols(i * d, d) = emb.level(i + 1);
  }
  for (Index c = 0; c < lhs.cols(); ++c) {
    const Scalar norm = lhs.col(c).norm();
    if (norm > Scalar(0)) {
      lhs.col(c) /= norm;
      rhs.col(c) /= norm;
    }
  }

  AdjacencyReconstruction<Scalar> out;
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(lhs.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(Scalar(1e-10));
  out.rank = svd.rank();
  if (out.rank < n) return out;

  // A * lhs = rhs  <=>  lhs^T * A^T = rhs^T
  MatrixX<Scalar> a = svd.solve(rhs.transpose()).transpose();
  a = (a + a.transpose()).eval() / Scalar(2);
  a.diagonal().setZero();

  Scalar residual = Scalar(0);
  MatrixX<Scalar> level = emb.level(0);
  for (Index i = 1; i <= t; ++i) {
    level = a * emb.level(i - 1);
    residual = std::max(residual, (level - emb.level(i)).cwiseAbs().maxCoeff());
  }
  out.residual = residual;
  const Scalar scale = std::max(Scalar(1), emb.level(t).cwiseAbs().maxCoeff());
  if (residual <= tolerance * scale) out.adjacency = std::move(a);
  return out;
}

}  // namespace gomk
