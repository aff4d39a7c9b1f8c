#include "gomk/adam.hpp"

#include <cmath>
#include <string>

#include "gomk/errors.hpp"

namespace gomk {

void AdamOptimizer::step(std::span<const ParameterBlock> params,
                         std::span<const Eigen::VectorXd> grads, std::string_view context) {
  if (params.size() != grads.size()) throw ShapeError("one gradient per parameter block expected");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (grads[b].size() != params[b].size) throw ShapeError("gradient block size mismatch");
    if (!grads[b].allFinite()) {
      throw TrainingError("non-finite gradient in parameter block " + std::to_string(b) +
                          " at optimizer step " + std::to_string(steps_ + 1) +
                          (context.empty() ? "" : " (" + std::string(context) + ")"));
    }
  }
  if (first_.empty()) {
    for (const auto& p : params) {
      first_.push_back(Eigen::VectorXd::Zero(p.size));
      second_.push_back(Eigen::VectorXd::Zero(p.size));
    }
  }
  if (first_.size() != params.size()) throw ShapeError("parameter layout changed between steps");

  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t b = 0; b < params.size(); ++b) {
    Eigen::Map<Eigen::VectorXd> p(params[b].data, params[b].size);
    first_[b] = config_.beta1 * first_[b] + (1.0 - config_.beta1) * grads[b];
    second_[b] = config_.beta2 * second_[b] + (1.0 - config_.beta2) * grads[b].cwiseAbs2();
    p.array() -= config_.learning_rate * (first_[b].array() / c1) /
                 ((second_[b].array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace gomk
