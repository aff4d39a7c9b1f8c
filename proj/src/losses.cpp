#include "gomk/losses.hpp"

#include <cmath>
#include <string>

#include "gomk/omk.hpp"
#include "gomk/parallel.hpp"

namespace gomk {

LossResult loss_iso(const Graphd& target, const GraphFilter& filter, Index t, double tau) {
  if (target.size() != filter.size()) throw ShapeError("target and filter sizes differ");
  const Graphd fg = filter.graph();
  const SubgraphEmbedding<double> target_emb = encode(target, t);
  const SubgraphEmbedding<double> filter_emb = encode(fg, t);
  const KernelValue<double> k = kernel(target_emb, filter_emb, tau, Matcher::greedy);
  FilterGradient<double> g = grad_kappa(target_emb, fg, tau, k.matching);
  g.d_adjacency = -g.d_adjacency;
  g.d_features = -g.d_features;
  LossResult out;
  out.loss = -k.value;
  out.tape.filters.push_back(std::move(g));
  return out;
}

FrequencyLossResult loss_frq(std::span<const SubgraphEmbedding<double>> subgraphs,
                             std::span<const GraphFilter> filters, double tau, int threads) {
  if (filters.empty()) throw ConfigError("pattern mining needs at least one filter");
  if (subgraphs.empty()) throw ConfigError("pattern mining needs at least one subgraph");
  check_width(tau);
  const Index m = subgraphs.front().node_count();
  const Index t = subgraphs.front().depth();

  for (const auto& sub : subgraphs) {
    if (sub.node_count() != m || sub.depth() != t) {
      throw ShapeError("all subgraphs must share size and depth");
    }
    if (sub.feature_dim() != filters.front().feature_dim()) {
      throw ShapeError("subgraph and filter feature dimensions differ");
    }
  }

  std::vector<Graphd> graphs;
  std::vector<SubgraphEmbedding<double>> filter_embs;
  for (const GraphFilter& f : filters) {
    graphs.push_back(pad_graph(f.graph(), m));
    filter_embs.push_back(encode(graphs.back(), t));
  }

  const auto count = static_cast<Index>(subgraphs.size());
  const int workers = worker_count(count, threads);
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> adjoints(static_cast<std::size_t>(workers));
  for (auto& per_worker : adjoints) {
    for (const auto& emb : filter_embs) per_worker.push_back(zero_level_adjoints(emb));
  }

  FrequencyLossResult out;
  out.assignment.assign(subgraphs.size(), -1);
  out.best_kappa.assign(subgraphs.size(), 0.0);
  parallel_for(count, threads, [&](Index begin, Index end, int w) {
    for (Index i = begin; i < end; ++i) {
      const auto& sub = subgraphs[static_cast<std::size_t>(i)];
      Index best = -1;
      KernelValue<double> best_k;
      for (std::size_t j = 0; j < filter_embs.size(); ++j) {
        KernelValue<double> k = kernel(sub, filter_embs[j], tau, Matcher::greedy);
        if (best < 0 || k.value > best_k.value) {
          best = static_cast<Index>(j);
          best_k = std::move(k);
        }
      }
      out.assignment[static_cast<std::size_t>(i)] = best;
      out.best_kappa[static_cast<std::size_t>(i)] = best_k.value;
      accumulate_kernel_adjoints<double>(sub, filter_embs[static_cast<std::size_t>(best)], best_k.matching,
                                 tau, 1.0, nullptr,
                                 &adjoints[static_cast<std::size_t>(w)][static_cast<std::size_t>(best)]);
    }
  });

  for (double k : out.best_kappa) out.loss -= k;
  for (std::size_t j = 0; j < filters.size(); ++j) {
    for (int w = 1; w < workers; ++w) {
      for (std::size_t i = 0; i < adjoints[0][j].size(); ++i) adjoints[0][j][i] += adjoints[static_cast<std::size_t>(w)][j][i];
    }
    const LevelBackprop<double> bp = backprop_levels(graphs[j].adjacency(), filter_embs[j], adjoints[0][j]);
    const Index n = filters[j].size();
    const Eigen::MatrixXd tied = tie_symmetric(bp.d_adjacency_raw);
    out.tape.filters.push_back({-tied.topLeftCorner(n, n), -bp.d_features.topRows(n)});
  }
  return out;
}

CrossEntropy softmax_cross_entropy(const Eigen::MatrixXd& logits, std::span<const Index> labels) {
  if (static_cast<Index>(labels.size()) != logits.rows()) throw ShapeError("one label per row expected");
  CrossEntropy out;
  out.d_logits.resize(logits.rows(), logits.cols());
  const double inv = logits.rows() > 0 ? 1.0 / static_cast<double>(logits.rows()) : 0.0;
  for (Index r = 0; r < logits.rows(); ++r) {
    const Index label = labels[static_cast<std::size_t>(r)];
    if (label < 0 || label >= logits.cols()) {
      throw DataError("label " + std::to_string(label) + " outside 0.." +
                      std::to_string(logits.cols() - 1));
    }
    Eigen::Index arg = 0;
    const double top = logits.row(r).maxCoeff(&arg);
    Eigen::RowVectorXd p = (logits.row(r).array() - top).exp();
    const double z = p.sum();
    p /= z;
    out.loss -= (logits(r, label) - top - std::log(z)) * inv;
    out.d_logits.row(r) = p * inv;
    out.d_logits(r, label) -= inv;
    if (arg == label) ++out.correct;
  }
  return out;
}

}  // namespace gomk
