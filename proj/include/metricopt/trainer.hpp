// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "metricopt/adam.hpp"
#include "metricopt/dataset.hpp"
#include "metricopt/losses.hpp"
#include "metricopt/metrics.hpp"
#include "metricopt/mlp.hpp"

namespace metricopt {

struct TrainConfig {
  std::size_t batch_size = 1024;
  std::size_t max_epochs = 5000;
  /// Epochs without a new best validation loss before stopping.
  std::size_t window = 100;
  LossConfig loss;
  AdamConfig adam;
  double dropout = 0.5;
  std::vector<std::size_t> hidden = {32, 16};
  /// Thresholds for the final test-split metric table.
  std::vector<double> eval_tau_grid = default_tau_grid();
  std::uint64_t seed = 0;

  void validate() const;
};

/// Tracks the best loss and how long it has stood.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t window);

  /// Records the loss for the next epoch; returns true once `window`
  /// consecutive epochs have passed without a strict improvement.
  bool observe(double loss);

  double best_loss() const noexcept { return best_; }
  /// 1-based epoch of the best loss, 0 before any observation.
  std::size_t best_epoch() const noexcept { return best_epoch_; }
  bool improved_last() const noexcept { return stale_ == 0; }

 private:
  std::size_t window_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> history;
  std::size_t stopping_epoch = 0;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
  bool early_stopped = false;
  /// Batches skipped because the loss is undefined on them (AUROC with one class).
  std::size_t skipped_batches = 0;
  MetricTable test_metrics;
  double wall_seconds = 0.0;
};

/// Called with the current model before each optimizer step.
using BatchObserver = std::function<void(const MlpModel&, const FeatureBatch&)>;

MlpModel make_model(std::size_t input_dim, const TrainConfig& config);

/// Mini-batch ADAM with early stopping on the validation loss (the training
/// objective on the whole validation split, dropout off). On return `model`
/// holds the parameters of the best validation epoch. Throws TrainingDiverged
/// if a loss or parameter becomes non-finite.
TrainReport train(MlpModel& model, const SplitDataset& data, const TrainConfig& config,
                  const BatchObserver& observer = {});

/// Evaluation-mode predictions for every row of `data`.
Vector predict_dataset(const MlpModel& model, const Dataset& data);

/// Serializes the report; `include_timing` = false drops wall-clock fields so
/// equal seeds give equal bytes.
nlohmann::json to_json(const TrainReport& report, bool include_timing = true);
nlohmann::json to_json(const MetricTable& table);

}  // namespace metricopt
