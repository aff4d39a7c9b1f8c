#include "gomk/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace gomk {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (threads < 1) throw ConfigError("thread count must be positive");
}

void adam_step(std::span<GraphFilter> filters, const GradientTape<double>& tape,
               AdamOptimizer& optimizer, std::string_view context) {
  if (tape.filters.size() != filters.size()) throw ShapeError("tape does not match the filters");
  std::vector<ParameterBlock> params;
  std::vector<Eigen::VectorXd> grads;
  for (std::size_t j = 0; j < filters.size(); ++j) {
    GraphFilter& f = filters[j];
    const Eigen::VectorXd flat = f.flatten_gradient(tape.filters[j]);
    params.push_back({f.edge_weights().data(), f.edge_weights().size()});
    grads.emplace_back(flat.head(f.edge_weights().size()));
    params.push_back({f.features().data(), f.features().size()});
    grads.emplace_back(flat.tail(f.features().size()));
  }
  optimizer.step(params, grads, context);
  for (GraphFilter& f : filters) f.project();
}

void adam_step(GomkcnModel& model, const GradientTape<double>& tape, AdamOptimizer& optimizer,
               std::string_view context) {
  const std::vector<Eigen::VectorXd> grads = model.gradient_blocks(tape);
  const std::vector<ParameterBlock> params = model.parameter_blocks();
  optimizer.step(params, grads, context);
  model.project();
}

IsoTrainResult train_iso(const Graphd& target, GraphFilter filter, Index t, double tau,
                         const TrainConfig& config) {
  config.validate();
  AdamOptimizer optimizer(config.adam());
  IsoTrainResult out;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const LossResult loss = loss_iso(target, filter, t, tau);
    out.kappa.push_back(-loss.loss);
    adam_step(std::span<GraphFilter>(&filter, 1), loss.tape, optimizer,
              "epoch " + std::to_string(epoch));
  }
  out.kappa.push_back(-loss_iso(target, filter, t, tau).loss);
  out.filter = std::move(filter);
  return out;
}

PatternTrainResult train_patterns(std::span<const SubgraphEmbedding<double>> subgraphs,
                                  std::vector<GraphFilter> filters, double tau,
                                  const TrainConfig& config) {
  config.validate();
  AdamOptimizer optimizer(config.adam());
  PatternTrainResult out;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const FrequencyLossResult loss = loss_frq(subgraphs, filters, tau, config.threads);
    out.loss.push_back(loss.loss);
    adam_step(std::span<GraphFilter>(filters), loss.tape, optimizer, "epoch " + std::to_string(epoch));
  }
  FrequencyLossResult final_loss = loss_frq(subgraphs, filters, tau, config.threads);
  out.assignment = std::move(final_loss.assignment);
  out.best_kappa = std::move(final_loss.best_kappa);
  out.filters = std::move(filters);
  return out;
}

namespace {

struct Snapshot {
  std::vector<Eigen::VectorXd> values;
};

Snapshot take_snapshot(GomkcnModel& model) {
  Snapshot s;
  for (const ParameterBlock& b : model.parameter_blocks()) {
    s.values.emplace_back(Eigen::Map<const Eigen::VectorXd>(b.data, b.size));
  }
  return s;
}

void restore(GomkcnModel& model, const Snapshot& s) {
  const std::vector<ParameterBlock> blocks = model.parameter_blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Eigen::Map<Eigen::VectorXd>(blocks[i].data, blocks[i].size) = s.values[i];
  }
}

}  // namespace

ClassifierTrainResult train_classifier(GomkcnModel& model,
                                       std::span<const GomkcnModel::Sample> train,
                                       std::span<const GomkcnModel::Sample> val,
                                       const TrainConfig& config,
                                       const std::function<void(const EpochMetrics&)>& on_epoch) {
  config.validate();
  if (train.empty()) throw DataError("empty training set");
  AdamOptimizer optimizer(config.adam());
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ClassifierTrainResult out;
  Snapshot best;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochMetrics m;
    m.epoch = epoch;
    double loss_sum = 0.0;
    Index correct = 0;
    Index seen = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(config.batch_size));
      std::vector<GomkcnModel::Sample> batch;
      batch.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) batch.push_back(train[order[i]]);
      GradientTape<double> tape;
      const GomkcnModel::BatchResult r = model.loss_classification(batch, &rng, config.threads, &tape);
      loss_sum += r.loss * static_cast<double>(r.count);
      correct += r.correct;
      seen += r.count;
      adam_step(model, tape, optimizer, "epoch " + std::to_string(epoch));
    }
    m.train_loss = loss_sum / static_cast<double>(seen);
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    if (!val.empty()) {
      const GomkcnModel::BatchResult r = model.evaluate(val, config.threads);
      m.val_loss = r.loss;
      m.val_accuracy = static_cast<double>(r.correct) / static_cast<double>(r.count);
      if (m.val_accuracy > out.best_val_accuracy) {
        out.best_val_accuracy = m.val_accuracy;
        out.best_epoch = epoch;
        best = take_snapshot(model);
      }
    }
    out.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  if (!val.empty()) {
    restore(model, best);
  } else {
    out.best_epoch = config.epochs - 1;
  }
  return out;
}

}  // namespace gomk
