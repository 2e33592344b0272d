// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/adam.hpp"

#include <cmath>

#include "metricopt/errors.hpp"

namespace metricopt {

AdamState::AdamState(const MlpModel& model, AdamConfig config) : config_(config) {
  for (const auto& layer : model.layers()) {
    DenseLayer zero{Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                    Vector::Zero(layer.bias.size())};
    first_.push_back(zero);
    second_.push_back(std::move(zero));
  }
}

void AdamState::step(MlpModel& model) {
  auto& layers = model.layers();
  const auto& grads = model.gradients();
  if (layers.size() != first_.size()) throw ShapeMismatch("optimizer state does not match model");

  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.size() != m.size()) throw ShapeMismatch("optimizer state does not match model");
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, grads[l].weight, first_[l].weight, second_[l].weight);
    update(layers[l].bias, grads[l].bias, first_[l].bias, second_[l].bias);
  }
}

}  // namespace metricopt
