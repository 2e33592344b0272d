// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "metricopt/heaviside.hpp"

namespace metricopt {

/// Sigmoid s(p) = 1 / (1 + exp(-k (p - center))) fitted to heaviside_approx.
struct SigmoidFit {
  double k = 1.0;
  double center = 0.5;
  /// Sum of squared errors over the fitting grid.
  double residual = 0.0;
  int iterations = 0;
};

double sigmoid_approx(double p, const SigmoidFit& fit) noexcept;
double sigmoid_approx_grad(double p, const SigmoidFit& fit) noexcept;

/// Least-squares fit of (k, center) on an even grid of `grid_size` points over
/// [0, 1], by Gauss-Newton with step halving.
///
/// Starts from k = 4 * middle slope (equal slopes at the center) and
/// center = tau. Stops when an iteration improves the residual by less than
/// 1e-10. Throws InvalidArgument for grid_size < 10 and NonConvergence when
/// 100 iterations pass without meeting the criterion.
SigmoidFit fit_sigmoid(const HeavisideParams& params, std::size_t grid_size = 200);

}  // namespace metricopt
