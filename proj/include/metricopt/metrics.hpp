// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metricopt/confusion.hpp"

namespace metricopt {

/// Denominator guard used by the training losses.
inline constexpr double kDefaultEpsilon = 1e-7;

/// Thresholds 0.1, 0.2, ..., 0.9.
std::vector<double> default_tau_grid();

struct MetricValue {
  std::string name;
  double value = 0.0;
  std::optional<double> tau;
  /// False when the unguarded denominator was zero; `value` is then 0.
  bool defined = true;
};

// Ratio metrics from (hard or soft) counts. Each ratio is num / (den + epsilon).
// Pass epsilon = 0 for exact reporting values.
MetricValue precision(const SoftCounts& c, double epsilon = kDefaultEpsilon);
MetricValue recall(const SoftCounts& c, double epsilon = kDefaultEpsilon);
MetricValue accuracy(const SoftCounts& c, double epsilon = kDefaultEpsilon);
/// Count form (1 + b^2) tp / ((1 + b^2) tp + b^2 fn + fp + epsilon).
MetricValue f_beta(const SoftCounts& c, double beta, double epsilon = kDefaultEpsilon);

inline MetricValue precision(const HardCounts& c, double epsilon = kDefaultEpsilon) {
  return precision(c.as_real(), epsilon);
}
inline MetricValue recall(const HardCounts& c, double epsilon = kDefaultEpsilon) {
  return recall(c.as_real(), epsilon);
}
inline MetricValue accuracy(const HardCounts& c, double epsilon = kDefaultEpsilon) {
  return accuracy(c.as_real(), epsilon);
}
inline MetricValue f_beta(const HardCounts& c, double beta, double epsilon = kDefaultEpsilon) {
  return f_beta(c.as_real(), beta, epsilon);
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half. Throws UndefinedMetric if a class is absent.
double auroc_hard(const LabeledBatch& batch);

/// Mean of one metric across the threshold grid, excluding undefined entries.
struct MetricSummary {
  std::string name;
  double mean = 0.0;
  std::size_t included = 0;
  std::size_t excluded = 0;
  bool defined() const noexcept { return included > 0; }
};

/// Hard accuracy, precision, recall and F1 at every grid threshold, their
/// grid means, and the rank AUROC.
struct MetricTable {
  std::vector<MetricValue> per_tau;
  std::vector<MetricSummary> means;
  MetricValue auroc;

  /// Throws InvalidArgument for an unknown metric name.
  const MetricSummary& summary(std::string_view name) const;
  /// Grid mean of `name`, or the AUROC for "auroc". Undefined means read as 0.
  double mean(std::string_view name) const;
};

MetricTable evaluate_over_grid(const LabeledBatch& batch, std::span<const double> tau_grid);

}  // namespace metricopt
