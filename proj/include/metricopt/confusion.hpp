// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "metricopt/surrogate.hpp"

namespace metricopt {

/// Non-owning view of predictions in [0, 1] and binary labels of equal length.
class LabeledBatch {
 public:
  /// Throws InvalidArgument on empty input, length mismatch, a prediction
  /// outside [0, 1] or a label other than 0/1.
  LabeledBatch(std::span<const double> predictions, std::span<const std::uint8_t> labels);

  std::size_t size() const noexcept { return predictions_.size(); }
  std::span<const double> predictions() const noexcept { return predictions_; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  double prediction(std::size_t i) const { return predictions_[i]; }
  int label(std::size_t i) const { return labels_[i]; }

  std::size_t positives() const noexcept;
  std::size_t negatives() const noexcept { return size() - positives(); }

 private:
  std::span<const double> predictions_;
  std::span<const std::uint8_t> labels_;
};

/// Four values indexed by confusion-matrix set. Used for per-sample soft
/// memberships, for their derivatives and for batch sums.
struct SoftCounts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;

  friend bool operator==(const SoftCounts&, const SoftCounts&) = default;
};

using Membership = SoftCounts;

struct HardCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const noexcept { return tp + fp + fn + tn; }
  SoftCounts as_real() const noexcept {
    return {static_cast<double>(tp), static_cast<double>(fp), static_cast<double>(fn),
            static_cast<double>(tn)};
  }
  friend bool operator==(const HardCounts&, const HardCounts&) = default;
};

// Soft set memberships, following the confusion-matrix truth tables with the
// surrogate H in place of the step:
//   tp: H    if y = 1 or p < tau, else 1 - H
//   fp: H    if y = 0 or p < tau, else 1 - H
//   fn: 1-H  if y = 1 or p >= tau, else H
//   tn: 1-H  if y = 0 or p >= tau, else H
// A negative sample below tau therefore adds H(p) (small) to the soft TP sum.
double tp_soft(double p, int y, const StepSurrogate& step);
double fp_soft(double p, int y, const StepSurrogate& step);
double fn_soft(double p, int y, const StepSurrogate& step);
double tn_soft(double p, int y, const StepSurrogate& step);

Membership soft_membership(double p, int y, const StepSurrogate& step);
/// d(tp_s, fp_s, fn_s, tn_s)/dp: +H' on H branches, -H' on 1 - H branches.
Membership soft_membership_grad(double p, int y, const StepSurrogate& step);

/// Compensated sums of the per-sample soft memberships.
SoftCounts aggregate_soft(const LabeledBatch& batch, const StepSurrogate& step);
std::vector<Membership> aggregate_soft_grad(const LabeledBatch& batch, const StepSurrogate& step);

HardCounts aggregate_hard(const LabeledBatch& batch, double tau);

}  // namespace metricopt
