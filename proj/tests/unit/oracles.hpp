// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles. Nothing here
// calls into the library except heaviside_approx.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "metricopt/heaviside.hpp"

namespace oracle {

struct Sample {
  double p;
  int y;
};

// Per-sample (tp, fp, fn, tn) memberships written out case by case.
inline std::array<double, 4> membership(double p, int y, double tau, double delta) {
  const double h = metricopt::heaviside_approx(p, metricopt::HeavisideParams(tau, delta));
  const bool below = p < tau;
  std::array<double, 4> m{};
  if (y == 1) {
    m[0] = h;                    // tp: always H for positives
    m[1] = below ? h : 1.0 - h;  // fp
    m[2] = 1.0 - h;              // fn: always 1 - H for positives
    m[3] = below ? h : 1.0 - h;  // tn
  } else {
    m[0] = below ? h : 1.0 - h;
    m[1] = h;
    m[2] = below ? h : 1.0 - h;
    m[3] = 1.0 - h;
  }
  return m;
}

inline std::array<double, 4> counts(const std::vector<double>& p, const std::vector<std::uint8_t>& y,
                                    double tau, double delta) {
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto m = membership(p[i], y[i], tau, delta);
    for (int k = 0; k < 4; ++k) c[k] += m[k];
  }
  return c;
}

// Fraction of positive-negative pairs ordered correctly, ties counting one half.
inline double pairwise_auroc(const std::vector<double>& p, const std::vector<std::uint8_t>& y) {
  double good = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (p[i] > p[j]) good += 1.0;
      if (p[i] == p[j]) good += 0.5;
    }
  }
  return good / pairs;
}

// Trapezoid under soft ROC points (sorted by FPR, then TPR) with (0,0) and (1,1) anchors.
inline double soft_auroc(const std::vector<double>& p, const std::vector<std::uint8_t>& y,
                         const std::vector<double>& taus, double delta, double eps) {
  std::vector<std::pair<double, double>> pts = {{0.0, 0.0}, {1.0, 1.0}};
  for (double tau : taus) {
    const auto c = counts(p, y, tau, delta);
    pts.emplace_back(c[1] / (c[1] + c[3] + eps), c[0] / (c[0] + c[2] + eps));
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    area += (pts[k].first - pts[k - 1].first) * (pts[k].second + pts[k - 1].second) / 2.0;
  }
  return area;
}

// Random batch with both classes present and predictions at least `margin`
// away from every breakpoint of every listed threshold.
inline void random_batch(std::mt19937_64& rng, std::size_t n, const std::vector<double>& taus, double delta,
                         double margin, std::vector<double>& p, std::vector<std::uint8_t>& y) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  p.assign(n, 0.0);
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      const double v = unit(rng);
      bool ok = v > margin && v < 1.0 - margin;
      for (double tau : taus) {
        const metricopt::HeavisideParams hp(tau, delta);
        for (double b : {tau, hp.lower_kink(), hp.upper_kink()}) ok = ok && std::abs(v - b) >= margin;
      }
      if (ok) {
        p[i] = v;
        break;
      }
    }
    y[i] = coin(rng) ? 1 : 0;
  }
  y[0] = 1;
  y[1] = 0;
}

inline bool close_rel(double analytic, double numeric, double rel, double abs_floor = 1e-9) {
  return std::abs(analytic - numeric) <= rel * std::max(std::abs(analytic), std::abs(numeric)) + abs_floor;
}

}  // namespace oracle
