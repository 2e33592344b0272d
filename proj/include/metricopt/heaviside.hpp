// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace metricopt {

inline constexpr double kDefaultDelta = 0.1;

/// Slopes of the lower, middle and upper segments.
struct SegmentSlopes {
  double lower;
  double middle;
  double upper;
};

/// Threshold and slope parameter of the three-segment step approximation.
///
/// The segments meet at p = tau - tau_m/2 (value delta) and
/// p = tau + tau_m/2 (value 1 - delta), where tau_m = min(tau, 1 - tau).
class HeavisideParams {
 public:
  /// Throws InvalidArgument unless 0 < tau < 1 and 0 < delta < 0.5.
  explicit HeavisideParams(double tau, double delta = kDefaultDelta);

  double tau() const noexcept { return tau_; }
  double delta() const noexcept { return delta_; }
  double tau_m() const noexcept { return tau_m_; }
  double lower_kink() const noexcept { return tau_ - tau_m_ / 2.0; }
  double upper_kink() const noexcept { return tau_ + tau_m_ / 2.0; }
  const SegmentSlopes& slopes() const noexcept { return slopes_; }

  /// Largest of the three slopes; the Lipschitz constant of the approximation.
  double max_slope() const noexcept;

 private:
  double tau_;
  double delta_;
  double tau_m_;
  SegmentSlopes slopes_;
};

/// Exact step: 1 iff p >= tau (ties go to the positive class).
constexpr int heaviside_exact(double p, double tau) noexcept {
  return p >= tau ? 1 : 0;
}

SegmentSlopes segment_slopes(const HeavisideParams& params) noexcept;

/// Piecewise-linear approximation of the step at `params.tau()`.
/// Exact at p = 0, p = tau (0.5) and p = 1.
double heaviside_approx(double p, const HeavisideParams& params) noexcept;

/// Derivative of heaviside_approx. Both kink points belong to the middle
/// segment, so the derivative there is the middle slope.
double heaviside_approx_grad(double p, const HeavisideParams& params) noexcept;

}  // namespace metricopt
