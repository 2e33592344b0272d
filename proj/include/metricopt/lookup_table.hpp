// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace metricopt {

/// Precomputed heaviside_approx values on a (p, tau) grid.
///
/// Cell (i, j) holds heaviside_approx(i / (p_resolution - 1), {tau_grid[j], delta}).
/// Lookups truncate p down to the nearest grid point, so a returned value is
/// within max_slope(tau) * p_step of the exact approximation. The quantized
/// storage mode keeps one byte per cell and adds up to 1/510 rounding error.
class LookupTable {
 public:
  enum class Storage { full_precision, quantized_u8 };

  /// Throws InvalidArgument for p_resolution < 2, an empty or non-increasing
  /// tau_grid, a threshold outside (0, 1) or an invalid delta.
  static LookupTable build(std::size_t p_resolution, std::vector<double> tau_grid, double delta,
                           Storage storage = Storage::full_precision);

  /// Constant-time lookup. Throws UnknownThreshold if tau is not on the grid.
  double lookup(double p, double tau) const;

  double cell(std::size_t p_index, std::size_t tau_index) const;
  std::size_t tau_index(double tau) const;
  std::size_t p_index(double p) const noexcept;

  std::size_t p_resolution() const noexcept { return p_resolution_; }
  const std::vector<double>& tau_grid() const noexcept { return tau_grid_; }
  double delta() const noexcept { return delta_; }
  double p_step() const noexcept { return 1.0 / static_cast<double>(p_resolution_ - 1); }
  Storage storage() const noexcept { return storage_; }

  /// Number of cells.
  std::size_t size() const noexcept { return p_resolution_ * tau_grid_.size(); }
  /// Bytes used by the cell values.
  std::size_t storage_bytes() const noexcept;

  /// Worst-case |lookup - heaviside_approx| for the tau at `tau_index`.
  double error_bound(std::size_t tau_index) const;

 private:
  LookupTable() = default;

  std::size_t p_resolution_ = 0;
  std::vector<double> tau_grid_;
  double delta_ = 0.0;
  Storage storage_ = Storage::full_precision;
  bool uniform_grid_ = false;
  double grid_step_ = 0.0;
  std::vector<double> values_;
  std::vector<std::uint8_t> quantized_;
};

}  // namespace metricopt
