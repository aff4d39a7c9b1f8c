#include "gomk/layer.hpp"

#include <string>

namespace gomk {

void LayerConfig::validate() const {
  if (filters < 1) throw ConfigError("a layer needs at least one filter");
  if (filter_nodes < 1) throw ConfigError("filters need at least one node");
  if (hops < 1) throw ConfigError("hop radius must be at least 1");
  if (t < 0) throw ConfigError("aggregation steps must be non-negative");
  if (!(tau > 0.0)) throw ConfigError("RBF width must be positive");
  if (standard_size() < filter_nodes) {
    throw ConfigError("subgraph size " + std::to_string(standard_size()) +
                      " is smaller than the filter size " + std::to_string(filter_nodes));
  }
}

std::vector<SubgraphPlan> plan_subgraphs(const Graphd& g, const LayerConfig& config) {
  const ExtractionOptions opt{config.hops, config.standard_size(), config.truncation,
                              config.truncation_seed};
  const Index m = config.standard_size();
  std::vector<SubgraphPlan> plans(static_cast<std::size_t>(g.size()));
  for (Index u = 0; u < g.size(); ++u) {
    SubgraphPlan& plan = plans[static_cast<std::size_t>(u)];
    plan.nodes = subgraph_nodes(g, u, opt);
    plan.adjacency = Eigen::MatrixXd::Zero(m, m);
    const auto real = static_cast<Index>(plan.nodes.size());
    for (Index i = 0; i < real; ++i) {
      for (Index j = i + 1; j < real; ++j) {
        const double a = g.adjacency()(plan.nodes[static_cast<std::size_t>(i)],
                                       plan.nodes[static_cast<std::size_t>(j)]);
        plan.adjacency(i, j) = a;
        plan.adjacency(j, i) = a;
      }
    }
  }
  return plans;
}

SubgraphEmbedding<double> embed_subgraph(const SubgraphPlan& plan, const Eigen::MatrixXd& x,
                                         Index t) {
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(plan.adjacency.rows(), x.cols());
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
    features.row(static_cast<Index>(i)) = x.row(plan.nodes[i]);
  }
  return encode<double>(plan.adjacency, features, t);
}

GomkcnLayer::GomkcnLayer(LayerConfig config, Index feature_dim, std::mt19937_64& rng)
    : config_(config), feature_dim_(feature_dim) {
  config_.validate();
  if (feature_dim < 1) throw ConfigError("layer input needs at least one feature");
  for (Index j = 0; j < config_.filters; ++j) {
    filters_.push_back(GraphFilter::random(config_.filter_nodes, feature_dim, config_.bounded, rng));
  }
}

double GomkcnLayer::output_scale() const {
  return config_.normalize
             ? 1.0 / (static_cast<double>(config_.standard_size()) * static_cast<double>(config_.t + 1))
             : 1.0;
}

FilterState GomkcnLayer::prepare() const {
  FilterState state;
  for (const GraphFilter& f : filters_) {
    state.graphs.push_back(pad_graph(f.graph(), config_.standard_size()));
    state.embeddings.push_back(encode(state.graphs.back(), config_.t));
  }
  return state;
}

Eigen::MatrixXd GomkcnLayer::forward(std::span<const SubgraphPlan> plans, const Eigen::MatrixXd& x,
                                     std::span<const Index> nodes, const FilterState& filters,
                                     Trace* trace) const {
  if (x.cols() != feature_dim_) {
    throw ShapeError("layer expects " + std::to_string(feature_dim_) + " input features, got " +
                     std::to_string(x.cols()));
  }
  const Index T = filter_count();
  const double scale = output_scale();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Index>(plans.size()), T);
  if (trace) {
    trace->nodes.assign(nodes.begin(), nodes.end());
    trace->embeddings.clear();
    trace->embeddings.reserve(nodes.size());
    trace->matchings.clear();
    trace->matchings.reserve(nodes.size() * static_cast<std::size_t>(T));
  }
  for (Index u : nodes) {
    SubgraphEmbedding<double> emb = embed_subgraph(plans[static_cast<std::size_t>(u)], x, config_.t);
    for (Index j = 0; j < T; ++j) {
      KernelValue<double> k =
          kernel(emb, filters.embeddings[static_cast<std::size_t>(j)], config_.tau, Matcher::greedy);
      z(u, j) = scale * k.value;
      if (trace) trace->matchings.push_back(std::move(k.matching));
    }
    if (trace) trace->embeddings.push_back(std::move(emb));
  }
  return z;
}

std::vector<std::vector<Eigen::MatrixXd>> GomkcnLayer::zero_filter_adjoints(
    const FilterState& filters) const {
  std::vector<std::vector<Eigen::MatrixXd>> out;
  for (const auto& emb : filters.embeddings) out.push_back(zero_level_adjoints(emb));
  return out;
}

Eigen::MatrixXd GomkcnLayer::backward(std::span<const SubgraphPlan> plans, const Trace& trace,
                                      const Eigen::MatrixXd& d_out, const FilterState& filters,
                                      std::vector<std::vector<Eigen::MatrixXd>>& filter_adjoints,
                                      bool need_input, Index input_rows) const {
  const Index T = filter_count();
  const double scale = output_scale();
  Eigen::MatrixXd d_x;
  if (need_input) d_x = Eigen::MatrixXd::Zero(input_rows, feature_dim_);
  for (std::size_t k = 0; k < trace.nodes.size(); ++k) {
    const Index u = trace.nodes[k];
    const auto& emb = trace.embeddings[k];
    std::vector<Eigen::MatrixXd> sub_adjoints;
    if (need_input) sub_adjoints = zero_level_adjoints(emb);
    bool touched = false;
    for (Index j = 0; j < T; ++j) {
      const double w = scale * d_out(u, j);
      if (w == 0.0) continue;
      touched = true;
      accumulate_kernel_adjoints<double>(emb, filters.embeddings[static_cast<std::size_t>(j)],
                                 trace.matchings[k * static_cast<std::size_t>(T) + static_cast<std::size_t>(j)],
                                 config_.tau, w, need_input ? &sub_adjoints : nullptr,
                                 &filter_adjoints[static_cast<std::size_t>(j)]);
    }
    if (need_input && touched) {
      const SubgraphPlan& plan = plans[static_cast<std::size_t>(u)];
      const LevelBackprop<double> bp = backprop_levels(plan.adjacency, emb, sub_adjoints, false);
      for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
        d_x.row(plan.nodes[i]) += bp.d_features.row(static_cast<Index>(i));
      }
    }
  }
  return d_x;
}

std::vector<FilterGradient<double>> GomkcnLayer::filter_gradients(
    const FilterState& filters,
    const std::vector<std::vector<Eigen::MatrixXd>>& filter_adjoints) const {
  std::vector<FilterGradient<double>> out;
  const Index n = config_.filter_nodes;
  for (std::size_t j = 0; j < filters.graphs.size(); ++j) {
    const LevelBackprop<double> bp =
        backprop_levels(filters.graphs[j].adjacency(), filters.embeddings[j], filter_adjoints[j]);
    const Eigen::MatrixXd tied = tie_symmetric(bp.d_adjacency_raw);
    out.push_back({tied.topLeftCorner(n, n), bp.d_features.topRows(n)});
  }
  return out;
}

}  // namespace gomk
