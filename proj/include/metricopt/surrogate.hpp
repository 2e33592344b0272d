// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "metricopt/heaviside.hpp"
#include "metricopt/lookup_table.hpp"
#include "metricopt/sigmoid_fit.hpp"

namespace metricopt {

enum class ApproximationKind { piecewise_linear, fitted_sigmoid, lookup_table };

/// A differentiable stand-in for the step at one threshold.
///
/// The threshold `tau()` always comes from the HeavisideParams; it decides the
/// branch of the soft membership tables even when the value itself comes from
/// a fitted sigmoid whose center is slightly off tau.
class StepSurrogate {
 public:
  // Implicit on purpose: a bare HeavisideParams means the piecewise-linear form.
  StepSurrogate(const HeavisideParams& params) : params_(params) {}  // NOLINT

  static StepSurrogate fitted_sigmoid(const HeavisideParams& params, const SigmoidFit& fit);
  /// Values come from `table` (which must contain params.tau()); derivatives
  /// stay analytic.
  static StepSurrogate tabulated(const HeavisideParams& params,
                                 std::shared_ptr<const LookupTable> table);

  ApproximationKind kind() const noexcept { return kind_; }
  const HeavisideParams& params() const noexcept { return params_; }
  double tau() const noexcept { return params_.tau(); }

  double value(double p) const;
  double derivative(double p) const;

 private:
  HeavisideParams params_;
  ApproximationKind kind_ = ApproximationKind::piecewise_linear;
  SigmoidFit fit_{};
  std::shared_ptr<const LookupTable> table_;
  std::size_t table_column_ = 0;
};

}  // namespace metricopt
