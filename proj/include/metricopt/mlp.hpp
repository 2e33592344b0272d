// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metricopt/dataset.hpp"
#include "metricopt/rng.hpp"

namespace metricopt {

/// Fully connected layer; weight is (outputs x inputs).
struct DenseLayer {
  Matrix weight;
  Vector bias;
};

/// Feedforward binary classifier: dense -> ReLU -> dropout for each hidden
/// width, then a single sigmoid unit. Dropout is inverted, so evaluation needs
/// no rescaling.
class MlpModel {
 public:
  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)) from `seed`, biases zero.
  MlpModel(std::size_t input_dim, std::vector<std::size_t> hidden = {32, 16}, double dropout = 0.5,
           std::uint64_t seed = 0);

  /// Caches activations for backward(). `rng` draws the dropout masks and is
  /// only touched in train mode. Throws ShapeMismatch on a width mismatch.
  Vector forward(const Matrix& features, bool train_mode, Engine& rng);
  Vector forward(const Matrix& features);

  /// Evaluation-mode prediction without touching the cache.
  Vector predict(const Matrix& features) const;

  /// Accumulates d loss / d parameter into the gradient buffers given
  /// d loss / d prediction for the rows of the last forward(). Throws
  /// ShapeMismatch if there is no cached forward of matching size.
  void backward(std::span<const double> loss_grad);

  void zero_grad();

  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::vector<std::size_t>& hidden() const noexcept { return hidden_; }
  double dropout() const noexcept { return dropout_; }

  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  const std::vector<DenseLayer>& gradients() const noexcept { return grads_; }

  // Flat view over all parameters (weights row-major, then bias, layer by layer).
  std::size_t parameter_count() const noexcept;
  double parameter(std::size_t index) const;
  void set_parameter(std::size_t index, double value);
  double gradient(std::size_t index) const;

  bool all_finite() const;

 private:
  struct Cache {
    Matrix input;
    std::vector<Matrix> pre;   // hidden pre-activations
    std::vector<Matrix> mask;  // dropout scale per unit, empty in eval mode
    std::vector<Matrix> act;   // hidden outputs after dropout
    Vector output;
    bool valid = false;
  };

  Vector run(const Matrix& features, bool train_mode, Engine* rng, Cache* cache) const;
  std::pair<std::size_t, std::size_t> locate(std::size_t index) const;

  std::size_t input_dim_;
  std::vector<std::size_t> hidden_;
  double dropout_;
  std::vector<DenseLayer> layers_;
  std::vector<DenseLayer> grads_;
  Cache cache_;
};

/// Versioned binary checkpoint: "MOPTNN" magic, u32 version, f64 dropout,
/// u64 input width, u64 layer count, then per layer u64 rows, u64 cols,
/// row-major f64 weights and f64 biases. Little-endian.
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace metricopt
