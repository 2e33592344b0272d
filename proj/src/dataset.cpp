// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "metricopt/binary_io.hpp"
#include "metricopt/errors.hpp"
#include "metricopt/rng.hpp"

namespace metricopt {
namespace {

constexpr std::string_view kDatasetMagic = "MODSET";
constexpr std::uint32_t kDatasetVersion = 1;
constexpr double kZeroVariance = 1e-12;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double quotes group commas and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

bool parse_finite(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

double Dataset::positive_fraction() const noexcept {
  return labels.empty() ? 0.0 : static_cast<double>(positives()) / static_cast<double>(size());
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("dataset has " + std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (!features.allFinite()) throw DataError("dataset contains non-finite feature values");
  for (auto y : labels) {
    if (y > 1) throw DataError("dataset labels must be 0 or 1");
  }
}

void Dataset::require_supervised() const {
  validate();
  const std::size_t pos = positives();
  if (size() < 2 || pos == 0 || pos == size()) {
    throw DataError("dataset needs at least two rows and both classes");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.resize(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(indices[r]));
    out.labels[r] = labels[indices[r]];
  }
  return out;
}

Dataset generate_blobs(const BlobSpec& spec, std::uint64_t seed) {
  if (spec.n_per_class < 1) throw InvalidArgument("n_per_class must be at least 1");
  if (!(spec.sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (spec.dims < 1) throw InvalidArgument("dims must be at least 1");

  Engine engine = make_engine(seed, Stream::data);
  std::normal_distribution<double> noise(0.0, spec.sigma);

  const auto n = static_cast<Eigen::Index>(2 * spec.n_per_class);
  const auto d = static_cast<Eigen::Index>(spec.dims);
  Dataset data;
  data.features.resize(n, d);
  data.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const bool positive = static_cast<std::size_t>(r) >= spec.n_per_class;
    const double center = positive ? spec.positive_center : spec.negative_center;
    for (Eigen::Index c = 0; c < d; ++c) data.features(r, c) = center + noise(engine);
    data.labels[static_cast<std::size_t>(r)] = positive ? 1 : 0;
  }
  return data;
}

Dataset subsample_positives(const Dataset& data, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw InvalidArgument("keep_fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> positive_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == 1) positive_rows.push_back(i);
  }
  const auto keep = static_cast<std::size_t>(
      std::llround(keep_fraction * static_cast<double>(positive_rows.size())));
  if (keep == 0) throw DataError("subsampling would leave no positive samples");

  Engine engine = make_engine(seed, Stream::subsample);
  std::shuffle(positive_rows.begin(), positive_rows.end(), engine);
  std::vector<bool> retained(data.size(), false);
  for (std::size_t i = 0; i < keep; ++i) retained[positive_rows[i]] = true;

  std::vector<std::size_t> rows;
  rows.reserve(data.size() - positive_rows.size() + keep);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == 0 || retained[i]) rows.push_back(i);
  }
  return data.subset(rows);
}

CsvLoadResult load_csv(const std::filesystem::path& path, const std::string& label_column,
                       const std::string& positive_value) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV file " + path.string() + " has no header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_record(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError("CSV file " + path.string() + " has no column '" + label_column + "'");
  }
  const auto label_index = static_cast<std::size_t>(label_it - header.begin());

  CsvLoadResult result;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_index) result.feature_names.push_back(header[c]);
  }
  const std::size_t d = result.feature_names.size();

  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  std::vector<double> row(d);
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_record(line);
    bool ok = fields.size() == header.size();
    for (std::size_t c = 0, f = 0; ok && c < fields.size(); ++c) {
      if (c == label_index) continue;
      ok = parse_finite(fields[c], row[f++]);
    }
    if (!ok || fields[label_index].empty()) {
      result.rejected_lines.push_back(line_number);
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(fields[label_index] == positive_value ? 1 : 0);
  }
  if (labels.empty()) throw DataError("CSV file " + path.string() + " has no usable rows");

  result.data.features =
      Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(labels.size()),
                               static_cast<Eigen::Index>(d));
  result.data.labels = std::move(labels);
  result.data.validate();
  return result;
}

Matrix Standardization::apply(const Matrix& features) const {
  if (features.cols() != mean.size()) throw DataError("standardization width mismatch");
  Matrix out = features.rowwise() - mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

SplitDataset standardize_and_split(const Dataset& data, SplitFractions fractions,
                                   std::uint64_t seed) {
  data.validate();
  const double total = fractions.train + fractions.validation + fractions.test;
  if (!(fractions.train > 0.0 && fractions.validation > 0.0 && fractions.test > 0.0) ||
      std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions must be positive and sum to 1");
  }
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fractions.train * static_cast<double>(n)));
  const auto n_val =
      static_cast<std::size_t>(std::llround(fractions.validation * static_cast<double>(n)));
  if (n_train < 1 || n_val < 1 || n_train + n_val >= n) {
    throw InvalidArgument("dataset of " + std::to_string(n) + " rows is too small to split");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine engine = make_engine(seed, Stream::split);
  std::shuffle(order.begin(), order.end(), engine);

  const std::span<const std::size_t> all(order);
  SplitDataset split;
  split.train = data.subset(all.subspan(0, n_train));
  split.validation = data.subset(all.subspan(n_train, n_val));
  split.test = data.subset(all.subspan(n_train + n_val));

  const Matrix& x = split.train.features;
  Standardization& s = split.standardization;
  s.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - s.mean.transpose();
  s.scale = (centered.array().square().colwise().sum() / static_cast<double>(x.rows()))
                .sqrt()
                .transpose();
  for (Eigen::Index c = 0; c < s.scale.size(); ++c) {
    if (!(s.scale(c) > kZeroVariance)) s.scale(c) = 1.0;
  }
  split.train.features = s.apply(split.train.features);
  split.validation.features = s.apply(split.validation.features);
  split.test.features = s.apply(split.test.features);
  return split;
}

std::vector<FeatureBatch> batches(const Dataset& data, std::size_t batch_size, std::uint64_t seed,
                                  std::uint64_t epoch) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine engine = make_engine(seed, Stream::shuffle, epoch);
  std::shuffle(order.begin(), order.end(), engine);

  std::vector<FeatureBatch> out;
  out.reserve((data.size() + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, order.size() - start);
    FeatureBatch b;
    b.indices.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(start + len));
    Dataset rows = data.subset(b.indices);
    b.features = std::move(rows.features);
    b.labels = std::move(rows.labels);
    out.push_back(std::move(b));
  }
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binary::write_magic(out, kDatasetMagic);
  binary::write_u32(out, kDatasetVersion);
  binary::write_u64(out, data.size());
  binary::write_u64(out, data.dims());
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) binary::write_f64(out, data.features(r, c));
  }
  out.write(reinterpret_cast<const char*>(data.labels.data()),
            static_cast<std::streamsize>(data.labels.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  binary::expect_magic(in, kDatasetMagic, "dataset cache");
  const std::uint32_t version = binary::read_u32(in);
  if (version != kDatasetVersion) {
    throw DataError("unsupported dataset cache version " + std::to_string(version));
  }
  const std::uint64_t n = binary::read_u64(in);
  const std::uint64_t d = binary::read_u64(in);
  if (n > (1ull << 32) || d > (1ull << 20)) throw DataError("implausible dataset cache shape");
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) data.features(r, c) = binary::read_f64(in);
  }
  data.labels.resize(n);
  if (!in.read(reinterpret_cast<char*>(data.labels.data()), static_cast<std::streamsize>(n))) {
    throw DataError("truncated dataset cache " + path.string());
  }
  data.validate();
  return data;
}

nlohmann::json summary_json(const Dataset& data) {
  nlohmann::json j;
  j["rows"] = data.size();
  j["dims"] = data.dims();
  j["positives"] = data.positives();
  j["positive_fraction"] = data.positive_fraction();
  std::vector<double> mean, stddev;
  for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
    const auto col = data.features.col(c);
    const double m = col.mean();
    mean.push_back(m);
    stddev.push_back(std::sqrt((col.array() - m).square().mean()));
  }
  j["feature_mean"] = mean;
  j["feature_std"] = stddev;
  return j;
}

}  // namespace metricopt
