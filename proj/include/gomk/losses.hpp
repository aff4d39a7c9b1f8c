#pragma once

#include <span>
#include <vector>

#include "gomk/filter.hpp"
#include "gomk/grad.hpp"
#include "gomk/tse.hpp"

namespace gomk {

struct LossResult {
  double loss = 0.0;
  /// Gradient of `loss` (not of kappa), one filter entry per trained filter.
  GradientTape<double> tape;
};

/// -kappa(target, filter) with the greedy matching held fixed for the gradient.
LossResult loss_iso(const Graphd& target, const GraphFilter& filter, Index t, double tau);

struct FrequencyLossResult : LossResult {
  /// Winning filter per subgraph (lowest index on ties).
  std::vector<Index> assignment;
  std::vector<double> best_kappa;
};

/// -sum_i max_j kappa(subgraph_i, filter_j); only each subgraph's winning filter receives gradient.
///
/// Subgraphs may be larger than the filters, which are then padded with
/// isolated zero nodes. Subgraph depth sets t.
FrequencyLossResult loss_frq(std::span<const SubgraphEmbedding<double>> subgraphs,
                             std::span<const GraphFilter> filters, double tau, int threads = 1);

struct CrossEntropy {
  double loss = 0.0;           // mean over rows
  Eigen::MatrixXd d_logits;    // gradient of the mean loss
  Index correct = 0;
};

CrossEntropy softmax_cross_entropy(const Eigen::MatrixXd& logits, std::span<const Index> labels);

}  // namespace gomk
