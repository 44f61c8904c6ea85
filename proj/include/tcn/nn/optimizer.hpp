#pragma once

#include <initializer_list>
#include <vector>

#include "tcn/nn/tensor.hpp"

namespace tcn::nn {

struct OptimizerConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-5;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::kInvalidConfig, "learning rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "momentum must lie in [0, 1)");
    }
    if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "weight decay must be >= 0");
  }
};

/// Momentum SGD with L2 weight decay folded into the gradient:
///   v <- momentum * v + (grad + weight_decay * w);  w <- w - learning_rate * v
template <typename Scalar>
void sgd_step(Parameter<Scalar>& p, const OptimizerConfig& cfg) {
  require_shape(p.grad.rows() == p.value.rows() && p.grad.cols() == p.value.cols() &&
                    p.velocity.rows() == p.value.rows() && p.velocity.cols() == p.value.cols(),
                "sgd_step: parameter, gradient and velocity shapes differ");
  const auto momentum = static_cast<Scalar>(cfg.momentum);
  const auto decay = static_cast<Scalar>(p.decay ? cfg.weight_decay : 0.0);
  p.velocity = momentum * p.velocity + p.grad + decay * p.value;
  p.value -= static_cast<Scalar>(cfg.learning_rate) * p.velocity;
}

template <typename Scalar>
void sgd_step(const std::vector<Parameter<Scalar>*>& params, const OptimizerConfig& cfg) {
  for (auto* p : params) sgd_step(*p, cfg);
}

template <typename Scalar>
void zero_grads(const std::vector<Parameter<Scalar>*>& params) {
  for (auto* p : params) p->zero_grad();
}

}  // namespace tcn::nn
