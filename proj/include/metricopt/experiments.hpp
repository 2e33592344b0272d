// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "metricopt/dataset.hpp"
#include "metricopt/losses.hpp"
#include "metricopt/trainer.hpp"

namespace metricopt {

enum class Command { train, evaluate, batch_sweep, loss_grid, fbeta_sweep, sigmoid_compare, dataset };
enum class OutputFormat { tsv, json };

std::string to_string(Command command);
/// Throws InvalidArgument for an unknown command name.
Command parse_command(std::string_view name);

/// Where the data of an experiment comes from.
///
///   synthetic-50          two blobs, 5000 per class (10000 rows, 50% positive)
///   synthetic-33          same with half the positives kept (7500 rows, 1/3 positive)
///   synthetic-20          a quarter of the positives kept (6250 rows, 20% positive)
///   synthetic-imbalanced  2.5% of the positives kept, positive center 16 (5125 rows, ~2.4% positive)
///   synthetic:key=value,...  with keys n, sigma, dims, neg, pos, keep
///   csv:PATH or PATH.csv  comma-separated file (see label_column)
///   cache:PATH            binary dataset cache
struct DatasetSource {
  enum class Kind { synthetic, csv, cache };
  Kind kind = Kind::synthetic;
  BlobSpec blobs;
  double keep_fraction = 1.0;
  std::filesystem::path path;
  std::string label_column = "label";
  std::string positive_value = "1";
  std::string text = "synthetic-50";

  static DatasetSource parse(std::string_view text);
};

/// Materializes the source. Synthetic data depends only on `seed`.
Dataset load_source(const DatasetSource& source, std::uint64_t seed);

/// A fully validated experiment description.
struct ExperimentSpec {
  Command command = Command::train;
  DatasetSource dataset;
  std::vector<std::string> losses = {"accuracy", "f1", "auroc", "bce"};
  std::vector<double> betas = {1.0, 2.0, 3.0};
  double tau = 0.5;
  std::vector<double> tau_grid = default_tau_grid();
  double delta = kDefaultDelta;
  std::vector<std::size_t> batch_sizes = {1024};
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::size_t max_epochs = 5000;
  std::size_t window = 100;
  double learning_rate = 0.001;
  double dropout = 0.5;
  bool grid_loss = false;
  std::vector<ApproximationKind> approximations = {ApproximationKind::piecewise_linear};
  std::size_t jobs = 1;
  std::string out;
  OutputFormat format = OutputFormat::tsv;
  std::string checkpoint;
  std::string report;

  /// Training configuration for one trial of `loss` (beta only matters for fbeta).
  TrainConfig train_config(std::string_view loss, double beta, ApproximationKind approx,
                           std::size_t batch_size, std::size_t trial) const;
};

using OptionMap = std::map<std::string, std::string>;

/// Reads `key = value` lines; keys before any `[section]` apply to every
/// command, keys inside `[command-name]` only to that command. `#` and `;`
/// start comments. Throws InvalidArgument on unreadable files or bad lines.
OptionMap read_config_file(const std::filesystem::path& path, Command command);

/// Converts raw option strings (config merged with flags) into a spec,
/// validating every field. Keys are flag names without the leading dashes.
ExperimentSpec build_spec(Command command, const OptionMap& options);

/// One line of an experiment table.
struct ResultRow {
  std::string config;
  std::string loss;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  std::size_t trials = 0;
  std::string tau_policy;
  /// "ok", or "error: <message>" for a failed cell.
  std::string status = "ok";
};

struct ResultTable {
  std::string experiment;
  std::vector<ResultRow> rows;

  bool has_failures() const;
  /// First ok row matching (config, loss, metric); throws InvalidArgument if none.
  const ResultRow& find(std::string_view config, std::string_view loss, std::string_view metric) const;
};

std::string to_tsv(const ResultTable& table);
nlohmann::json to_json(const ResultTable& table);
/// Columns metric, tau, value, defined, excluded.
std::string to_tsv(const MetricTable& table);

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

ResultTable run_loss_grid(const ExperimentSpec& spec);
ResultTable run_fbeta_sweep(const ExperimentSpec& spec);
ResultTable run_sigmoid_compare(const ExperimentSpec& spec);
/// At every training batch, |F1(batch) - F1(train split)| at tau under the
/// current model; one training run per batch size.
ResultTable run_batch_sweep(const ExperimentSpec& spec);

/// Parses argv, runs the command and writes its output to --out (or `out`).
/// Returns 0 on success, 2 if some cells failed, 1 on specification errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metricopt
