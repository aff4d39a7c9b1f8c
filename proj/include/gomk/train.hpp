#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gomk/adam.hpp"
#include "gomk/filter.hpp"
#include "gomk/losses.hpp"
#include "gomk/model.hpp"

namespace gomk {

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.01;
  Index batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  int threads = 1;

  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
  void validate() const;
};

/// Adam update on a set of filters from a loss tape, then projection onto the box constraints.
void adam_step(std::span<GraphFilter> filters, const GradientTape<double>& tape,
               AdamOptimizer& optimizer, std::string_view context = {});

/// Adam update on every trainable part of a model, then projection of its filters.
void adam_step(GomkcnModel& model, const GradientTape<double>& tape, AdamOptimizer& optimizer,
               std::string_view context = {});

struct IsoTrainResult {
  GraphFilter filter;
  std::vector<double> kappa;  // kappa(target, filter) before each epoch's step, plus the final value
};

/// Maximizes kappa(target, filter) starting from `filter`.
IsoTrainResult train_iso(const Graphd& target, GraphFilter filter, Index t, double tau,
                         const TrainConfig& config);

struct PatternTrainResult {
  std::vector<GraphFilter> filters;
  std::vector<double> loss;      // per epoch, before the step
  std::vector<Index> assignment; // winning filter per subgraph after training
  std::vector<double> best_kappa;
};

/// Full-batch minimization of the frequency loss over all subgraphs.
PatternTrainResult train_patterns(std::span<const SubgraphEmbedding<double>> subgraphs,
                                  std::vector<GraphFilter> filters, double tau,
                                  const TrainConfig& config);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct ClassifierTrainResult {
  std::vector<EpochMetrics> history;
  int best_epoch = -1;
  double best_val_accuracy = -1.0;
};

/// Mini-batch training; keeps the parameters of the epoch with the best validation
/// accuracy (earliest on ties). With an empty validation set the final epoch is kept.
ClassifierTrainResult train_classifier(GomkcnModel& model,
                                       std::span<const GomkcnModel::Sample> train,
                                       std::span<const GomkcnModel::Sample> val,
                                       const TrainConfig& config,
                                       const std::function<void(const EpochMetrics&)>& on_epoch = {});

}  // namespace gomk
