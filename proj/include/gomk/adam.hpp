#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "gomk/types.hpp"

namespace gomk {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Contiguous block of trainable scalars owned elsewhere.
struct ParameterBlock {
  double* data = nullptr;
  Index size = 0;
};

/// Adam moments for a fixed list of parameter blocks.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig config = {}) : config_(config) {}

  /// One descent step on params given the loss gradient per block.
  /// Throws TrainingError (with `context` in the message) on a non-finite gradient.
  void step(std::span<const ParameterBlock> params, std::span<const Eigen::VectorXd> grads,
            std::string_view context = {});

  long steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  long steps_ = 0;
  std::vector<Eigen::VectorXd> first_;
  std::vector<Eigen::VectorXd> second_;
};

}  // namespace gomk
