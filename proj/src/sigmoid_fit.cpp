// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/sigmoid_fit.hpp"

#include <cmath>
#include <vector>

#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 60;
constexpr double kImprovementTolerance = 1e-10;

double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sum_squares(const std::vector<double>& grid, const std::vector<double>& target, double k,
                   double center) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = logistic(k * (grid[i] - center)) - target[i];
    total += r * r;
  }
  return total;
}

}  // namespace

double sigmoid_approx(double p, const SigmoidFit& fit) noexcept {
  return logistic(fit.k * (p - fit.center));
}

double sigmoid_approx_grad(double p, const SigmoidFit& fit) noexcept {
  const double s = sigmoid_approx(p, fit);
  return fit.k * s * (1.0 - s);
}

SigmoidFit fit_sigmoid(const HeavisideParams& params, std::size_t grid_size) {
  if (grid_size < 10) throw InvalidArgument("sigmoid fit needs grid_size >= 10");

  std::vector<double> grid(grid_size);
  std::vector<double> target(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(grid_size - 1);
    target[i] = heaviside_approx(grid[i], params);
  }

  double k = 4.0 * params.slopes().middle;
  double center = params.tau();
  double residual = sum_squares(grid, target, k, center);

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    // Normal equations for the 2x2 Gauss-Newton system.
    double jkk = 0.0, jkc = 0.0, jcc = 0.0, gk = 0.0, gc = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) {
      const double s = logistic(k * (grid[i] - center));
      const double ds = s * (1.0 - s);
      const double dk = ds * (grid[i] - center);
      const double dc = -k * ds;
      const double r = s - target[i];
      jkk += dk * dk;
      jkc += dk * dc;
      jcc += dc * dc;
      gk += dk * r;
      gc += dc * r;
    }
    const double det = jkk * jcc - jkc * jkc;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
      throw NonConvergence("singular Gauss-Newton system in sigmoid fit");
    }
    const double step_k = -(jcc * gk - jkc * gc) / det;
    const double step_c = -(jkk * gc - jkc * gk) / det;

    double scale = 1.0;
    double trial = residual;
    double next_k = k, next_c = center;
    int halvings = 0;
    for (; halvings < kMaxHalvings; ++halvings, scale *= 0.5) {
      next_k = k + scale * step_k;
      next_c = center + scale * step_c;
      if (next_k <= 0.0) continue;
      trial = sum_squares(grid, target, next_k, next_c);
      if (trial < residual) break;
    }
    if (halvings == kMaxHalvings) {
      // No descent along the Gauss-Newton direction: already at a stationary point.
      return SigmoidFit{k, center, residual, iter};
    }

    const double improvement = residual - trial;
    k = next_k;
    center = next_c;
    residual = trial;
    if (!std::isfinite(residual)) throw NonConvergence("sigmoid fit residual is not finite");
    if (improvement < kImprovementTolerance) return SigmoidFit{k, center, residual, iter};
  }
  throw NonConvergence("sigmoid fit did not converge within 100 iterations");
}

}  // namespace metricopt
