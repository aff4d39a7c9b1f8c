#include "gomk/model.hpp"

#include <numeric>
#include <string>

#include "gomk/losses.hpp"
#include "gomk/parallel.hpp"

namespace gomk {

struct GomkcnModel::SampleTrace {
  Mlp::Cache front_cache;
  std::vector<Eigen::MatrixXd> inputs;  // input of each layer
  std::vector<GomkcnLayer::Trace> traces;
  Eigen::MatrixXd output;               // last layer responses (n x T)
  std::vector<Index> pool_arg;          // max pooling argmax per filter
};

GomkcnModel::GomkcnModel(ModelConfig config, Index input_dim, std::uint64_t seed)
    : config_(std::move(config)), input_dim_(input_dim) {
  if (config_.layers.empty()) throw ConfigError("the model needs at least one GOMKCN layer");
  if (config_.classes < 2) throw ConfigError("classification needs at least two classes");
  if (input_dim < 1) throw ConfigError("input features must be non-empty");
  std::mt19937_64 rng(seed);
  Index dim = input_dim;
  if (!config_.front_sizes.empty()) {
    std::vector<Index> sizes{input_dim};
    sizes.insert(sizes.end(), config_.front_sizes.begin(), config_.front_sizes.end());
    front_ = Mlp(sizes, config_.dropout, rng);
    dim = front_.output_dim();
  }
  for (const LayerConfig& lc : config_.layers) {
    layers_.emplace_back(lc, dim, rng);
    dim = lc.filters;
  }
  std::vector<Index> sizes{dim};
  sizes.insert(sizes.end(), config_.classifier_hidden.begin(), config_.classifier_hidden.end());
  sizes.push_back(config_.classes);
  classifier_ = Mlp(sizes, config_.dropout, rng);
}

GomkcnModel::Plan GomkcnModel::plan(const Graphd& g) const {
  Plan p;
  for (const GomkcnLayer& layer : layers_) p.layers.push_back(plan_subgraphs(g, layer.config()));
  return p;
}

GomkcnModel::BatchResult GomkcnModel::loss_classification(std::span<const Sample> batch,
                                                          std::mt19937_64* rng, int threads,
                                                          GradientTape<double>* tape) const {
  const auto count = static_cast<Index>(batch.size());
  const auto L = static_cast<Index>(layers_.size());
  const Index T = layers_.back().filter_count();
  const bool graph_task = config_.task == Task::graph;

  std::vector<FilterState> states;
  for (const GomkcnLayer& layer : layers_) states.push_back(layer.prepare());

  std::vector<Index> row_offset(batch.size() + 1, 0);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const Sample& sample = batch[s];
    if (sample.graph == nullptr || sample.plan == nullptr) throw ConfigError("sample without graph or plan");
    if (sample.graph->feature_dim() != input_dim_) {
      throw ShapeError("sample has " + std::to_string(sample.graph->feature_dim()) +
                       " features, model expects " + std::to_string(input_dim_));
    }
    const Index rows = graph_task ? 1 : static_cast<Index>(sample.nodes.size());
    if (static_cast<Index>(sample.labels.size()) != rows) throw DataError("label count does not match sample");
    row_offset[s + 1] = row_offset[s] + rows;
  }

  std::uint64_t dropout_seed = rng ? (*rng)() : 0;
  std::vector<SampleTrace> traces(batch.size());
  Eigen::MatrixXd reps(row_offset.back(), T);
  std::vector<Index> labels(static_cast<std::size_t>(row_offset.back()));

  parallel_for(count, threads, [&](Index begin, Index end, int) {
    for (Index s = begin; s < end; ++s) {
      const Sample& sample = batch[static_cast<std::size_t>(s)];
      SampleTrace& tr = traces[static_cast<std::size_t>(s)];
      const Graphd& g = *sample.graph;
      std::mt19937_64 local(dropout_seed + static_cast<std::uint64_t>(s));
      Eigen::MatrixXd x = front_.empty()
                              ? g.features()
                              : front_.forward(g.features(), rng ? &local : nullptr,
                                               tape ? &tr.front_cache : nullptr);
      std::vector<Index> all(static_cast<std::size_t>(g.size()));
      std::iota(all.begin(), all.end(), Index(0));
      tr.traces.resize(static_cast<std::size_t>(L));
      for (Index l = 0; l < L; ++l) {
        const bool last = l + 1 == L;
        std::span<const Index> nodes = (!last || graph_task) ? std::span<const Index>(all)
                                                             : std::span<const Index>(sample.nodes);
        Eigen::MatrixXd z = layers_[static_cast<std::size_t>(l)].forward(
            sample.plan->layers[static_cast<std::size_t>(l)], x, nodes, states[static_cast<std::size_t>(l)],
            tape ? &tr.traces[static_cast<std::size_t>(l)] : nullptr);
        if (tape) tr.inputs.push_back(std::move(x));
        x = std::move(z);
      }
      const Index row = row_offset[static_cast<std::size_t>(s)];
      if (graph_task) {
        switch (config_.pooling) {
          case Pooling::max:
            tr.pool_arg.assign(static_cast<std::size_t>(T), 0);
            for (Index j = 0; j < T; ++j) {
              Eigen::Index arg = 0;
              reps(row, j) = x.col(j).maxCoeff(&arg);
              tr.pool_arg[static_cast<std::size_t>(j)] = arg;
            }
            break;
          case Pooling::add:
            reps.row(row) = x.colwise().sum();
            break;
          case Pooling::mean:
            reps.row(row) = x.colwise().mean();
            break;
        }
        labels[static_cast<std::size_t>(row)] = sample.labels.front();
      } else {
        for (std::size_t k = 0; k < sample.nodes.size(); ++k) {
          reps.row(row + static_cast<Index>(k)) = x.row(sample.nodes[k]);
          labels[static_cast<std::size_t>(row) + k] = sample.labels[k];
        }
      }
      if (tape) tr.output = std::move(x);
    }
  });

  Mlp::Cache cls_cache;
  BatchResult result;
  result.logits = classifier_.forward(reps, rng, tape ? &cls_cache : nullptr);
  const CrossEntropy ce = softmax_cross_entropy(result.logits, labels);
  result.loss = ce.loss;
  result.correct = ce.correct;
  result.count = reps.rows();
  result.predictions.resize(static_cast<std::size_t>(reps.rows()));
  for (Index r = 0; r < reps.rows(); ++r) {
    Eigen::Index arg = 0;
    result.logits.row(r).maxCoeff(&arg);
    result.predictions[static_cast<std::size_t>(r)] = arg;
  }
  if (!tape) return result;

  *tape = zero_tape();
  const std::size_t front_layers = front_.layers().size();
  const Eigen::MatrixXd d_reps = classifier_.backward(cls_cache, ce.d_logits, tape->mlp.data() + front_layers);

  const int workers = worker_count(count, threads);
  struct WorkerGrad {
    std::vector<std::vector<std::vector<Eigen::MatrixXd>>> adjoints;  // layer, filter, level
    std::vector<DenseGradient<double>> front;
  };
  std::vector<WorkerGrad> partial(static_cast<std::size_t>(workers));
  for (WorkerGrad& wg : partial) {
    for (std::size_t l = 0; l < layers_.size(); ++l) wg.adjoints.push_back(layers_[l].zero_filter_adjoints(states[l]));
    wg.front = front_.zero_gradients();
  }

  parallel_for(count, threads, [&](Index begin, Index end, int w) {
    WorkerGrad& wg = partial[static_cast<std::size_t>(w)];
    for (Index s = begin; s < end; ++s) {
      const Sample& sample = batch[static_cast<std::size_t>(s)];
      const SampleTrace& tr = traces[static_cast<std::size_t>(s)];
      const Index n = sample.graph->size();
      const Index row = row_offset[static_cast<std::size_t>(s)];
      Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(n, T);
      if (graph_task) {
        switch (config_.pooling) {
          case Pooling::max:
            for (Index j = 0; j < T; ++j) d_out(tr.pool_arg[static_cast<std::size_t>(j)], j) = d_reps(row, j);
            break;
          case Pooling::add:
            d_out.rowwise() = d_reps.row(row);
            break;
          case Pooling::mean:
            d_out.rowwise() = d_reps.row(row) / static_cast<double>(n);
            break;
        }
      } else {
        for (std::size_t k = 0; k < sample.nodes.size(); ++k) {
          d_out.row(sample.nodes[k]) += d_reps.row(row + static_cast<Index>(k));
        }
      }
      for (Index l = L - 1; l >= 0; --l) {
        const bool need_input = l > 0 || !front_.empty();
        const auto ls = static_cast<std::size_t>(l);
        Eigen::MatrixXd d_in = layers_[ls].backward(sample.plan->layers[ls], tr.traces[ls], d_out,
                                                    states[ls], wg.adjoints[ls], need_input, n);
        if (!need_input) break;
        d_out = std::move(d_in);
      }
      if (!front_.empty()) front_.backward(tr.front_cache, d_out, wg.front.data());
    }
  });

  std::size_t f = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& total = partial[0].adjoints[l];
    for (int w = 1; w < workers; ++w) {
      for (std::size_t j = 0; j < total.size(); ++j) {
        for (std::size_t i = 0; i < total[j].size(); ++i) total[j][i] += partial[static_cast<std::size_t>(w)].adjoints[l][j][i];
      }
    }
    for (FilterGradient<double>& g : layers_[l].filter_gradients(states[l], total)) tape->filters[f++] = std::move(g);
  }
  for (std::size_t i = 0; i < front_layers; ++i) {
    for (int w = 0; w < workers; ++w) {
      tape->mlp[i].d_weight += partial[static_cast<std::size_t>(w)].front[i].d_weight;
      tape->mlp[i].d_bias += partial[static_cast<std::size_t>(w)].front[i].d_bias;
    }
  }
  tape->scale = static_cast<double>(result.count);
  return result;
}

Eigen::MatrixXd GomkcnModel::responses(const Graphd& g, const Plan& plan, Index layer) const {
  const auto L = static_cast<Index>(layers_.size());
  if (layer < 0) layer = L - 1;
  if (layer >= L) throw IndexError("layer index out of range");
  Eigen::MatrixXd x = front_.empty() ? g.features() : front_.forward(g.features(), nullptr, nullptr);
  std::vector<Index> all(static_cast<std::size_t>(g.size()));
  std::iota(all.begin(), all.end(), Index(0));
  for (Index l = 0; l <= layer; ++l) {
    const auto ls = static_cast<std::size_t>(l);
    x = layers_[ls].forward(plan.layers[ls], x, all, layers_[ls].prepare(), nullptr);
  }
  return x;
}

GradientTape<double> GomkcnModel::zero_tape() const {
  GradientTape<double> tape;
  for (const GomkcnLayer& layer : layers_) {
    for (const GraphFilter& f : layer.filters()) tape.filters.push_back(FilterGradient<double>::zero(f.size(), f.feature_dim()));
  }
  for (const Mlp* mlp : {&front_, &classifier_}) {
    for (auto& g : mlp->zero_gradients()) tape.mlp.push_back(std::move(g));
  }
  return tape;
}

std::vector<ParameterBlock> GomkcnModel::parameter_blocks() {
  std::vector<ParameterBlock> blocks;
  for (GomkcnLayer& layer : layers_) {
    for (GraphFilter& f : layer.filters()) {
      blocks.push_back({f.edge_weights().data(), f.edge_weights().size()});
      blocks.push_back({f.features().data(), f.features().size()});
    }
  }
  for (Mlp* mlp : {&front_, &classifier_}) {
    for (Mlp::Layer& l : mlp->layers()) {
      blocks.push_back({l.weight.data(), l.weight.size()});
      blocks.push_back({l.bias.data(), l.bias.size()});
    }
  }
  return blocks;
}

std::vector<Eigen::VectorXd> GomkcnModel::gradient_blocks(const GradientTape<double>& tape) const {
  std::vector<Eigen::VectorXd> grads;
  std::size_t f = 0;
  for (const GomkcnLayer& layer : layers_) {
    for (const GraphFilter& filter : layer.filters()) {
      const Eigen::VectorXd flat = filter.flatten_gradient(tape.filters[f++]);
      grads.emplace_back(flat.head(filter.edge_weights().size()));
      grads.emplace_back(flat.tail(filter.features().size()));
    }
  }
  for (const auto& g : tape.mlp) {
    grads.emplace_back(g.d_weight.reshaped());
    grads.emplace_back(g.d_bias);
  }
  return grads;
}

void GomkcnModel::project() {
  for (GomkcnLayer& layer : layers_) {
    for (GraphFilter& f : layer.filters()) f.project();
  }
}

bool GomkcnModel::feasible() const {
  for (const GomkcnLayer& layer : layers_) {
    for (const GraphFilter& f : layer.filters()) {
      if (!f.feasible()) return false;
    }
  }
  return true;
}

}  // namespace gomk
