// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "metricopt/mlp.hpp"

namespace metricopt {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected first and second moments for every parameter of a model.
class AdamState {
 public:
  AdamState(const MlpModel& model, AdamConfig config = {});

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t steps() const noexcept { return steps_; }

  /// One update using the model's gradient buffers. Throws ShapeMismatch if
  /// the model's layers differ from the ones this state was built for.
  void step(MlpModel& model);

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<DenseLayer> first_;
  std::vector<DenseLayer> second_;
};

inline void adam_step(AdamState& state, MlpModel& model) { state.step(model); }

}  // namespace metricopt
