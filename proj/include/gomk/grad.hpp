#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gomk/errors.hpp"
#include "gomk/graph.hpp"
#include "gomk/omk.hpp"
#include "gomk/tse.hpp"
#include "gomk/types.hpp"

namespace gomk {

/// Gradient with respect to one graph's parameters.
///
/// d_adjacency(i, j) is the derivative with respect to the tied weight shared
/// by entries (i, j) and (j, i), so the matrix is symmetric with a zero diagonal.
template <typename Scalar>
struct FilterGradient {
  MatrixX<Scalar> d_adjacency;
  MatrixX<Scalar> d_features;

  static FilterGradient zero(Index n, Index d) {
    return {MatrixX<Scalar>::Zero(n, n), MatrixX<Scalar>::Zero(n, d)};
  }
};

template <typename Scalar>
struct DenseGradient {
  MatrixX<Scalar> d_weight;
  VectorX<Scalar> d_bias;
};

/// Accumulated partial derivatives of a scalar loss for every trainable part of a model.
template <typename Scalar>
struct GradientTape {
  std::vector<FilterGradient<Scalar>> filters;
  std::vector<DenseGradient<Scalar>> mlp;
  /// Number of samples summed into the tape; losses are means over this count.
  Scalar scale = Scalar(1);

  void add(const GradientTape& other) {
    if (filters.size() != other.filters.size() || mlp.size() != other.mlp.size()) {
      throw ShapeError("gradient tapes have different layouts");
    }
    for (std::size_t i = 0; i < filters.size(); ++i) {
      filters[i].d_adjacency += other.filters[i].d_adjacency;
      filters[i].d_features += other.filters[i].d_features;
    }
    for (std::size_t i = 0; i < mlp.size(); ++i) {
      mlp[i].d_weight += other.mlp[i].d_weight;
      mlp[i].d_bias += other.mlp[i].d_bias;
    }
  }

  void multiply(Scalar factor) {
    for (auto& f : filters) {
      f.d_adjacency *= factor;
      f.d_features *= factor;
    }
    for (auto& l : mlp) {
      l.d_weight *= factor;
      l.d_bias *= factor;
    }
  }

  bool all_finite() const {
    for (const auto& f : filters) {
      if (!f.d_adjacency.allFinite() || !f.d_features.allFinite()) return false;
    }
    for (const auto& l : mlp) {
      if (!l.d_weight.allFinite() || !l.d_bias.allFinite()) return false;
    }
    return true;
  }
};

/// Level adjoints of one graph: entry i holds dLoss/d(A^i F).
template <typename Scalar>
std::vector<MatrixX<Scalar>> zero_level_adjoints(const SubgraphEmbedding<Scalar>& emb) {
  return std::vector<MatrixX<Scalar>>(static_cast<std::size_t>(emb.depth() + 1),
                                      MatrixX<Scalar>::Zero(emb.node_count(), emb.feature_dim()));
}

/// Adds weight * dkappa/d(levels) for a fixed matching to either side's adjoints (null to skip).
///
/// For a pair (x, y) at level i with diff = f_x^i - f_y^i the level term is
/// e = exp(-|diff|^2 / (d tau)), giving dkappa/df_y^i = e * 2/(d tau) * diff.
template <typename Scalar>
void accumulate_kernel_adjoints(const SubgraphEmbedding<Scalar>& x_emb,
                                const SubgraphEmbedding<Scalar>& y_emb,
                                const Matching<Scalar>& matching, Scalar tau, Scalar weight,
                                std::vector<MatrixX<Scalar>>* x_adjoints,
                                std::vector<MatrixX<Scalar>>* y_adjoints) {
  const Index d = x_emb.feature_dim();
  const Scalar inv = Scalar(1) / (static_cast<Scalar>(d) * tau);
  for (const auto& pair : matching.pairs) {
    for (Index i = 0; i <= x_emb.depth(); ++i) {
      const auto& lx = x_emb.level(i);
      const auto& ly = y_emb.level(i);
      Scalar sq = Scalar(0);
      for (Index c = 0; c < d; ++c) {
        const Scalar diff = lx(pair.x, c) - ly(pair.y, c);
        sq += diff * diff;
      }
      const Scalar coef = weight * std::exp(-sq * inv) * Scalar(2) * inv;
      for (Index c = 0; c < d; ++c) {
        const Scalar g = coef * (lx(pair.x, c) - ly(pair.y, c));
        if (y_adjoints) (*y_adjoints)[static_cast<std::size_t>(i)](pair.y, c) += g;
        if (x_adjoints) (*x_adjoints)[static_cast<std::size_t>(i)](pair.x, c) -= g;
      }
    }
  }
}

/// Raw (untied) gradients of a loss through levels C_i = A C_{i-1}, C_0 = F.
template <typename Scalar>
struct LevelBackprop {
  MatrixX<Scalar> d_adjacency_raw;
  MatrixX<Scalar> d_features;
};

template <typename Scalar>
LevelBackprop<Scalar> backprop_levels(const MatrixX<Scalar>& adjacency,
                                      const SubgraphEmbedding<Scalar>& emb,
                                      const std::vector<MatrixX<Scalar>>& adjoints,
                                      bool need_adjacency = true) {
  const Index t = emb.depth();
  LevelBackprop<Scalar> out;
  if (need_adjacency) out.d_adjacency_raw = MatrixX<Scalar>::Zero(adjacency.rows(), adjacency.cols());
  MatrixX<Scalar> carry = adjoints[static_cast<std::size_t>(t)];
  for (Index i = t; i >= 1; --i) {
    if (need_adjacency) out.d_adjacency_raw.noalias() += carry * emb.level(i - 1).transpose();
    MatrixX<Scalar> next = adjacency.transpose() * carry;
    next += adjoints[static_cast<std::size_t>(i - 1)];
    carry = std::move(next);
  }
  out.d_features = std::move(carry);
  return out;
}

/// Gradient with respect to the tied symmetric weight: G + G^T with a zero diagonal.
template <typename Scalar>
MatrixX<Scalar> tie_symmetric(const MatrixX<Scalar>& raw) {
  MatrixX<Scalar> tied = raw + raw.transpose();
  tied.diagonal().setZero();
  return tied;
}

/// dkappa/d(filter parameters) for a fixed matching between a subgraph and a filter.
template <typename Scalar>
FilterGradient<Scalar> grad_kappa(const SubgraphEmbedding<Scalar>& subgraph_emb,
                                  const Graph<Scalar>& filter, Scalar tau,
                                  const Matching<Scalar>& matching) {
  check_width(tau);
  if (subgraph_emb.node_count() != filter.size()) {
    throw ShapeError("matching is stale: subgraph has " + std::to_string(subgraph_emb.node_count()) +
                     " nodes, filter has " + std::to_string(filter.size()));
  }
  if (subgraph_emb.feature_dim() != filter.feature_dim()) {
    throw ShapeError("subgraph and filter feature dimensions differ");
  }
  if (static_cast<Index>(matching.pairs.size()) != filter.size()) {
    throw ShapeError("matching is stale: wrong number of pairs");
  }
  matching.validate(subgraph_emb.node_count(), filter.size());
  const SubgraphEmbedding<Scalar> filter_emb = encode(filter, subgraph_emb.depth());
  auto adjoints = zero_level_adjoints(filter_emb);
  accumulate_kernel_adjoints<Scalar>(subgraph_emb, filter_emb, matching, tau, Scalar(1), nullptr,
                                     &adjoints);
  LevelBackprop<Scalar> bp = backprop_levels(filter.adjacency(), filter_emb, adjoints);
  return {tie_symmetric(bp.d_adjacency_raw), std::move(bp.d_features)};
}

template <typename Scalar>
FilterGradient<Scalar> grad_kappa(const SubgraphEmbedding<Scalar>& subgraph_emb,
                                  const Graph<Scalar>& filter, Index t, Scalar tau,
                                  const Matching<Scalar>& matching) {
  if (subgraph_emb.depth() != t) throw ShapeError("embedding depth differs from t");
  return grad_kappa(subgraph_emb, filter, tau, matching);
}

struct FiniteDifferenceReport {
  double max_relative_error = 0.0;
  Index worst_index = -1;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

/// Relative error of an analytic gradient against central differences.
///
/// Per coordinate the error is |a - n| / max(|a|, |n|, floor); the floor
/// keeps coordinates whose true derivative is ~0 from dividing roundoff by zero.
template <typename Scalar>
FiniteDifferenceReport finite_difference_check(
    const std::function<Scalar(const VectorX<Scalar>&)>& loss, const VectorX<Scalar>& params,
    const VectorX<Scalar>& analytic, Scalar h = Scalar(1e-5), Scalar floor = Scalar(1e-2)) {
  if (analytic.size() != params.size()) throw ShapeError("gradient and parameter sizes differ");
  FiniteDifferenceReport report;
  VectorX<Scalar> probe = params;
  for (Index i = 0; i < params.size(); ++i) {
    probe(i) = params(i) + h;
    const Scalar up = loss(probe);
    probe(i) = params(i) - h;
    const Scalar down = loss(probe);
    probe(i) = params(i);
    const Scalar numeric = (up - down) / (Scalar(2) * h);
    const Scalar denom = std::max({std::abs(analytic(i)), std::abs(numeric), floor});
    const double err = static_cast<double>(std::abs(analytic(i) - numeric) / denom);
    if (err > report.max_relative_error || report.worst_index < 0) {
      report.max_relative_error = err;
      report.worst_index = i;
      report.analytic_at_worst = static_cast<double>(analytic(i));
      report.numeric_at_worst = static_cast<double>(numeric);
    }
  }
  return report;
}

}  // namespace gomk
