// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/heaviside.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metricopt/errors.hpp"

namespace metricopt {

HeavisideParams::HeavisideParams(double tau, double delta) : tau_(tau), delta_(delta) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    throw InvalidArgument("delta must lie in (0, 0.5), got " + std::to_string(delta));
  }
  tau_m_ = std::min(tau_, 1.0 - tau_);
  slopes_.lower = delta_ / (tau_ - tau_m_ / 2.0);
  slopes_.middle = (1.0 - 2.0 * delta_) / tau_m_;
  slopes_.upper = delta_ / (1.0 - tau_ - tau_m_ / 2.0);
}

double HeavisideParams::max_slope() const noexcept {
  return std::max({slopes_.lower, slopes_.middle, slopes_.upper});
}

SegmentSlopes segment_slopes(const HeavisideParams& params) noexcept { return params.slopes(); }

// Each segment is written in point-slope form around the point it must hit
// exactly: (0, 0), (tau, 0.5) and (1, 1). This is algebraically the same line
// as the slope-intercept form but keeps those three values free of rounding.
double heaviside_approx(double p, const HeavisideParams& params) noexcept {
  const auto& m = params.slopes();
  if (p < params.lower_kink()) return p * m.lower;
  if (p > params.upper_kink()) return 1.0 - (1.0 - p) * m.upper;
  return 0.5 + (p - params.tau()) * m.middle;
}

double heaviside_approx_grad(double p, const HeavisideParams& params) noexcept {
  const auto& m = params.slopes();
  if (p < params.lower_kink()) return m.lower;
  if (p > params.upper_kink()) return m.upper;
  return m.middle;
}

}  // namespace metricopt
