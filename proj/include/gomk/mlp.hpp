#pragma once

#include <random>
#include <vector>

#include "gomk/grad.hpp"
#include "gomk/types.hpp"

namespace gomk {

/// Fully connected network with ReLU between layers and inverted dropout on hidden activations.
///
/// Rows of the input are samples. The last layer is linear.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // in x out
    Eigen::VectorXd bias;    // out
  };

  /// Activations kept by forward() for the backward pass.
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer (after dropout)
    std::vector<Eigen::MatrixXd> masks;   // dropout scale per layer input; empty when unused
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each hidden layer
  };

  Mlp() = default;
  /// sizes = {input, hidden..., output}; He-uniform weights, zero biases.
  Mlp(std::vector<Index> sizes, double dropout, std::mt19937_64& rng);

  bool empty() const { return layers_.empty(); }
  Index input_dim() const { return layers_.front().weight.rows(); }
  Index output_dim() const { return layers_.back().weight.cols(); }
  double dropout() const { return dropout_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  /// `rng` enables dropout (training mode); null disables it.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, std::mt19937_64* rng, Cache* cache) const;

  /// Adds parameter gradients into `grads` (one entry per layer) and returns dLoss/dInput.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                           DenseGradient<double>* grads) const;

  std::vector<DenseGradient<double>> zero_gradients() const;

 private:
  std::vector<Layer> layers_;
  double dropout_ = 0.0;
};

}  // namespace gomk
