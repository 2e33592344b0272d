// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/lookup_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metricopt/errors.hpp"
#include "metricopt/heaviside.hpp"

namespace metricopt {
namespace {

constexpr double kGridMatchTolerance = 1e-9;
// Absorbs representation error such as 0.29 * 99 landing just below an integer.
constexpr double kTruncationSlack = 1e-9;

}  // namespace

LookupTable LookupTable::build(std::size_t p_resolution, std::vector<double> tau_grid, double delta,
                               Storage storage) {
  if (p_resolution < 2) throw InvalidArgument("lookup table needs p_resolution >= 2");
  if (tau_grid.empty()) throw InvalidArgument("lookup table needs a nonempty tau grid");
  for (std::size_t j = 1; j < tau_grid.size(); ++j) {
    if (!(tau_grid[j] > tau_grid[j - 1])) {
      throw InvalidArgument("tau grid must be strictly increasing");
    }
  }

  LookupTable table;
  table.p_resolution_ = p_resolution;
  table.tau_grid_ = std::move(tau_grid);
  table.delta_ = delta;
  table.storage_ = storage;

  const auto& grid = table.tau_grid_;
  if (grid.size() >= 2) {
    const double step = grid[1] - grid[0];
    bool uniform = true;
    for (std::size_t j = 2; j < grid.size() && uniform; ++j) {
      uniform = std::abs(grid[j] - (grid[0] + static_cast<double>(j) * step)) <= kGridMatchTolerance;
    }
    table.uniform_grid_ = uniform;
    table.grid_step_ = step;
  }

  std::vector<HeavisideParams> params;
  params.reserve(grid.size());
  for (double tau : grid) params.emplace_back(tau, delta);

  const std::size_t cells = table.size();
  if (storage == Storage::full_precision) {
    table.values_.resize(cells);
  } else {
    table.quantized_.resize(cells);
  }
  const double denom = static_cast<double>(p_resolution - 1);
  for (std::size_t i = 0; i < p_resolution; ++i) {
    const double p = static_cast<double>(i) / denom;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = heaviside_approx(p, params[j]);
      const std::size_t at = i * grid.size() + j;
      if (storage == Storage::full_precision) {
        table.values_[at] = v;
      } else {
        table.quantized_[at] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return table;
}

std::size_t LookupTable::tau_index(double tau) const {
  std::size_t j = 0;
  if (uniform_grid_) {
    const double k = std::round((tau - tau_grid_.front()) / grid_step_);
    if (k >= 0.0 && k < static_cast<double>(tau_grid_.size())) j = static_cast<std::size_t>(k);
  } else {
    auto it = std::lower_bound(tau_grid_.begin(), tau_grid_.end(), tau);
    if (it == tau_grid_.end()) {
      --it;
    } else if (it != tau_grid_.begin() && (tau - *(it - 1)) < (*it - tau)) {
      --it;
    }
    j = static_cast<std::size_t>(it - tau_grid_.begin());
  }
  if (std::abs(tau_grid_[j] - tau) > kGridMatchTolerance) {
    throw UnknownThreshold("threshold " + std::to_string(tau) + " is not on the lookup grid");
  }
  return j;
}

std::size_t LookupTable::p_index(double p) const noexcept {
  const double scaled = std::clamp(p, 0.0, 1.0) * static_cast<double>(p_resolution_ - 1);
  const auto i = static_cast<std::size_t>(std::floor(scaled + kTruncationSlack));
  return std::min(i, p_resolution_ - 1);
}

double LookupTable::cell(std::size_t p_index, std::size_t tau_index) const {
  const std::size_t at = p_index * tau_grid_.size() + tau_index;
  if (storage_ == Storage::full_precision) return values_.at(at);
  return static_cast<double>(quantized_.at(at)) / 255.0;
}

double LookupTable::lookup(double p, double tau) const { return cell(p_index(p), tau_index(tau)); }

std::size_t LookupTable::storage_bytes() const noexcept {
  return storage_ == Storage::full_precision ? values_.size() * sizeof(double) : quantized_.size();
}

double LookupTable::error_bound(std::size_t tau_index) const {
  const HeavisideParams params(tau_grid_.at(tau_index), delta_);
  double bound = params.max_slope() * p_step();
  if (storage_ == Storage::quantized_u8) bound += 0.5 / 255.0;
  return bound;
}

}  // namespace metricopt
