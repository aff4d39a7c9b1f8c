#include "gomk/mlp.hpp"

#include <cmath>

#include "gomk/errors.hpp"

namespace gomk {

Mlp::Mlp(std::vector<Index> sizes, double dropout, std::mt19937_64& rng) : dropout_(dropout) {
  if (sizes.size() < 2) throw ConfigError("an MLP needs input and output sizes");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i + 1] < 1) throw ConfigError("MLP layer sizes must be positive");
    const double bound = std::sqrt(6.0 / static_cast<double>(sizes[i]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Layer layer{Eigen::MatrixXd(sizes[i], sizes[i + 1]), Eigen::VectorXd::Zero(sizes[i + 1])};
    for (Index c = 0; c < layer.weight.cols(); ++c) {
      for (Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = dist(rng);
    }
    layers_.push_back(std::move(layer));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, std::mt19937_64* rng, Cache* cache) const {
  if (x.cols() != input_dim()) throw ShapeError("MLP input has the wrong width");
  if (cache) *cache = Cache{};
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd mask;
    if (l > 0 && rng && dropout_ > 0.0) {
      std::bernoulli_distribution keep(1.0 - dropout_);
      mask.resize(h.rows(), h.cols());
      for (Index c = 0; c < h.cols(); ++c) {
        for (Index r = 0; r < h.rows(); ++r) mask(r, c) = keep(*rng) ? 1.0 / (1.0 - dropout_) : 0.0;
      }
      h = h.cwiseProduct(mask);
    }
    Eigen::MatrixXd z = h * layers_[l].weight;
    z.rowwise() += layers_[l].bias.transpose();
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->masks.push_back(std::move(mask));
    }
    if (l + 1 < layers_.size()) {
      if (cache) cache->pre.push_back(z);
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                              DenseGradient<double>* grads) const {
  Eigen::MatrixXd d = d_out;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Layer& layer = layers_[li];
    grads[li].d_weight.noalias() += cache.inputs[li].transpose() * d;
    grads[li].d_bias += d.colwise().sum().transpose();
    Eigen::MatrixXd d_in = d * layer.weight.transpose();
    if (cache.masks[li].size() != 0) d_in = d_in.cwiseProduct(cache.masks[li]);
    if (li > 0) d_in = (cache.pre[li - 1].array() > 0.0).select(d_in, 0.0);
    d = std::move(d_in);
  }
  return d;
}

std::vector<DenseGradient<double>> Mlp::zero_gradients() const {
  std::vector<DenseGradient<double>> out;
  for (const Layer& l : layers_) {
    out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                   Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

}  // namespace gomk
