// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace metricopt {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Feature rows with binary labels.
struct Dataset {
  Matrix features;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }
  std::size_t positives() const noexcept;
  double positive_fraction() const noexcept;

  /// Throws DataError on shape mismatch, non-finite features or non-binary labels.
  void validate() const;
  /// Throws DataError unless there are at least two rows and both classes.
  void require_supervised() const;

  /// Rows in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
};

/// Two isotropic Gaussian clusters, negatives around negative_center * 1 and
/// positives around positive_center * 1.
struct BlobSpec {
  std::size_t n_per_class = 5000;
  double sigma = 10.0;
  std::size_t dims = 3;
  double negative_center = 0.0;
  double positive_center = 10.0;
};

/// Negatives first, then positives. Same spec and seed give identical data.
Dataset generate_blobs(const BlobSpec& spec, std::uint64_t seed);

/// Keeps every negative and round(keep_fraction * positives) uniformly chosen
/// positives, preserving row order. Throws InvalidArgument for keep_fraction
/// outside (0, 1] and DataError if no positive would remain.
Dataset subsample_positives(const Dataset& data, double keep_fraction, std::uint64_t seed);

struct CsvLoadResult {
  Dataset data;
  std::vector<std::string> feature_names;
  /// 1-based line numbers of rows dropped for missing or non-numeric values.
  std::vector<std::size_t> rejected_lines;
  std::size_t rejected_rows() const noexcept { return rejected_lines.size(); }
};

/// Comma-delimited file with a header row. Every column except the label
/// column is a feature; a label equal to `positive_value` (after trimming)
/// maps to 1 and anything else to 0. Throws DataError for a missing file,
/// missing label column or zero usable rows.
CsvLoadResult load_csv(const std::filesystem::path& path, const std::string& label_column,
                       const std::string& positive_value = "1");

/// Per-feature affine map fitted on the training split.
struct Standardization {
  Vector mean;
  Vector scale;
  Matrix apply(const Matrix& features) const;
};

struct SplitFractions {
  double train = 0.64;
  double validation = 0.16;
  double test = 0.20;
};

struct SplitDataset {
  Dataset train;
  Dataset validation;
  Dataset test;
  Standardization standardization;
};

/// Shuffles with `seed`, splits by `fractions` (train and validation sizes
/// rounded, test takes the rest), then centers and scales every split with
/// statistics of the train split only. Zero-variance features get scale 1.
/// Throws InvalidArgument if fractions do not sum to 1 or a split is empty.
SplitDataset standardize_and_split(const Dataset& data, SplitFractions fractions,
                                   std::uint64_t seed);

struct FeatureBatch {
  Matrix features;
  std::vector<std::uint8_t> labels;
  std::vector<std::size_t> indices;
};

/// One epoch of mini-batches. The order is a permutation keyed by (seed,
/// epoch); the last batch may be short.
std::vector<FeatureBatch> batches(const Dataset& data, std::size_t batch_size, std::uint64_t seed,
                                  std::uint64_t epoch);

/// Versioned binary cache: "MODSET" magic, u32 version, u64 rows, u64 cols,
/// row-major f64 features, u8 labels, all little-endian.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// Row count, dimensionality, class balance and per-feature mean/std.
nlohmann::json summary_json(const Dataset& data);

}  // namespace metricopt
