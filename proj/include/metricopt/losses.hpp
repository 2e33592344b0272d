// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "metricopt/confusion.hpp"
#include "metricopt/metrics.hpp"

namespace metricopt {

enum class Objective { accuracy, f_beta, auroc, bce };

std::string to_string(Objective objective);
/// Accepts accuracy, f1, fbeta, auroc and bce. Throws InvalidArgument otherwise.
Objective parse_objective(std::string_view name);

std::string to_string(ApproximationKind kind);
/// Accepts linear, sigmoid and lookup.
ApproximationKind parse_approximation(std::string_view name);

struct LossConfig {
  Objective objective = Objective::f_beta;
  double beta = 1.0;
  /// Threshold used by the accuracy and F-beta losses.
  double tau_train = 0.5;
  /// Thresholds integrated by the AUROC loss (and averaged over when
  /// average_over_grid is set).
  std::vector<double> tau_grid = default_tau_grid();
  double delta = kDefaultDelta;
  double epsilon = kDefaultEpsilon;
  ApproximationKind approximation = ApproximationKind::piecewise_linear;
  /// Average accuracy/F-beta losses over tau_grid instead of using tau_train.
  bool average_over_grid = false;
  /// Grid size for the fitted sigmoid and p resolution for the lookup table.
  std::size_t sigmoid_grid = 200;
  std::size_t lookup_resolution = 100;

  /// Throws InvalidArgument on beta <= 0, thresholds outside (0, 1), a bad
  /// delta or epsilon <= 0.
  void validate() const;
};

struct LossResult {
  double loss = 0.0;
  /// d loss / d prediction, one entry per sample.
  std::vector<double> grad;
};

/// A configured training objective. Surrogates (including sigmoid fits and
/// lookup tables) are built once at construction.
///
/// Metric losses are 1 - metric on soft counts, hence in [0, 1]. BCE is the
/// mean log loss with predictions clamped to [epsilon, 1 - epsilon].
class MetricLoss {
 public:
  explicit MetricLoss(LossConfig config);

  const LossConfig& config() const noexcept { return config_; }

  /// The AUROC loss needs both classes; everything else is always defined.
  bool defined_on(const LabeledBatch& batch) const;

  LossResult evaluate(const LabeledBatch& batch) const;
  double value(const LabeledBatch& batch) const { return evaluate(batch).loss; }

 private:
  LossResult single_threshold(const LabeledBatch& batch, const StepSurrogate& step) const;
  LossResult grid_average(const LabeledBatch& batch) const;
  LossResult auroc(const LabeledBatch& batch) const;

  LossConfig config_;
  std::vector<StepSurrogate> train_step_;  // exactly one element
  std::vector<StepSurrogate> grid_steps_;
};

LossResult fbeta_loss(const LabeledBatch& batch, const LossConfig& config);
LossResult accuracy_loss(const LabeledBatch& batch, const LossConfig& config);
/// Throws UndefinedMetric if a class is absent from the batch.
LossResult auroc_soft_loss(const LabeledBatch& batch, const LossConfig& config);
LossResult bce_loss(const LabeledBatch& batch, double epsilon = kDefaultEpsilon);

/// Trapezoid area under the soft ROC points at each surrogate's threshold,
/// anchored at (0, 0) and (1, 1).
double soft_auroc(const LabeledBatch& batch, std::span<const StepSurrogate> steps,
                  double epsilon = kDefaultEpsilon);

}  // namespace metricopt
