// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep = ',') {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto at = text.find(sep, start);
    parts.push_back(trim(text.substr(start, at == std::string_view::npos ? at : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

double to_double(std::string_view key, const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InvalidArgument("option '" + std::string(key) + "' expects a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_unsigned(std::string_view key, const std::string& text) {
  std::uint64_t v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("option '" + std::string(key) + "' expects a non-negative integer, got '" +
                          text + "'");
  }
  return v;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_short(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool as_bool(std::string_view key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("option '" + std::string(key) + "' expects true or false, got '" + text + "'");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dataset", "loss", "beta", "tau", "tau-grid", "delta", "batch-size", "trials",
      "seed", "out", "format", "max-epochs", "window", "lr", "dropout", "approx",
      "label-column", "positive-value", "checkpoint", "report", "jobs", "grid-loss"};
  return keys;
}

SplitDataset prepare_split(const ExperimentSpec& spec) {
  Dataset data = load_source(spec.dataset, spec.seed);
  data.require_supervised();
  return standardize_and_split(data, SplitFractions{}, spec.seed);
}

/// Runs `trials` independent trainings; the result order never depends on `jobs`.
std::vector<TrainReport> run_trials(const ExperimentSpec& spec, const SplitDataset& split,
                                    const std::string& loss, double beta, ApproximationKind approx,
                                    std::size_t batch_size) {
  auto one = [&](std::size_t trial) {
    const TrainConfig config = spec.train_config(loss, beta, approx, batch_size, trial);
    MlpModel model = make_model(split.train.dims(), config);
    return train(model, split, config);
  };
  std::vector<TrainReport> reports;
  reports.reserve(spec.trials);
  if (spec.jobs <= 1) {
    for (std::size_t t = 0; t < spec.trials; ++t) reports.push_back(one(t));
    return reports;
  }
  for (std::size_t start = 0; start < spec.trials; start += spec.jobs) {
    std::vector<std::future<TrainReport>> pending;
    for (std::size_t t = start; t < std::min(spec.trials, start + spec.jobs); ++t) {
      pending.push_back(std::async(std::launch::async, one, t));
    }
    for (auto& f : pending) reports.push_back(f.get());
  }
  return reports;
}

void add_metric_rows(ResultTable& table, const std::string& config, const std::string& loss,
                     const std::vector<TrainReport>& reports, const std::vector<std::string>& metrics) {
  for (const auto& metric : metrics) {
    std::vector<double> values;
    for (const auto& r : reports) values.push_back(r.test_metrics.mean(metric));
    const auto [mean, sd] = mean_std(values);
    table.rows.push_back({config, loss, metric, mean, sd, reports.size(),
                          metric == "auroc" ? "rank" : "grid-mean", "ok"});
  }
}

void add_error_rows(ResultTable& table, const std::string& config, const std::string& loss,
                    const std::vector<std::string>& metrics, std::size_t trials, const std::string& what) {
  for (const auto& metric : metrics) {
    table.rows.push_back({config, loss, metric, std::nan(""), std::nan(""), trials,
                          metric == "auroc" ? "rank" : "grid-mean", "error: " + what});
  }
}

std::string loss_label(const std::string& loss, double beta) {
  if (loss == "fbeta") return "f" + format_short(beta);
  return loss;
}

void write_output(const ExperimentSpec& spec, const std::string& text, std::ostream& fallback) {
  if (spec.out.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(spec.out, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write output file " + spec.out);
  file << text;
}

std::string render(const ExperimentSpec& spec, const ResultTable& table) {
  return spec.format == OutputFormat::json ? to_json(table).dump(2) + "\n" : to_tsv(table);
}

std::string render(const ExperimentSpec& spec, const MetricTable& table) {
  return spec.format == OutputFormat::json ? to_json(table).dump(2) + "\n" : to_tsv(table);
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::train:
      return "train";
    case Command::evaluate:
      return "evaluate";
    case Command::batch_sweep:
      return "batch-sweep";
    case Command::loss_grid:
      return "loss-grid";
    case Command::fbeta_sweep:
      return "fbeta-sweep";
    case Command::sigmoid_compare:
      return "sigmoid-compare";
    case Command::dataset:
      return "dataset";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::train, Command::evaluate, Command::batch_sweep, Command::loss_grid,
                    Command::fbeta_sweep, Command::sigmoid_compare, Command::dataset}) {
    if (to_string(c) == name) return c;
  }
  throw InvalidArgument("unknown command '" + std::string(name) + "'");
}

DatasetSource DatasetSource::parse(std::string_view text) {
  DatasetSource s;
  s.text = std::string(text);
  if (text == "synthetic-50") return s;
  if (text == "synthetic-33") {
    s.keep_fraction = 0.5;
    return s;
  }
  if (text == "synthetic-20") {
    s.keep_fraction = 0.25;
    return s;
  }
  if (text == "synthetic-imbalanced") {
    // Wider separation so that the best achievable F1 stays well above zero.
    s.keep_fraction = 0.025;
    s.blobs.positive_center = 16.0;
    return s;
  }
  if (text.starts_with("synthetic:")) {
    for (const auto& item : split_list(text.substr(10))) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidArgument("bad synthetic dataset item '" + item + "'");
      const std::string key = trim(item.substr(0, eq));
      const std::string value = trim(item.substr(eq + 1));
      if (key == "n") {
        s.blobs.n_per_class = to_unsigned(key, value);
      } else if (key == "sigma") {
        s.blobs.sigma = to_double(key, value);
      } else if (key == "dims") {
        s.blobs.dims = to_unsigned(key, value);
      } else if (key == "neg") {
        s.blobs.negative_center = to_double(key, value);
      } else if (key == "pos") {
        s.blobs.positive_center = to_double(key, value);
      } else if (key == "keep") {
        s.keep_fraction = to_double(key, value);
      } else {
        throw InvalidArgument("unknown synthetic dataset key '" + key + "'");
      }
    }
    if (s.blobs.n_per_class < 1 || !(s.blobs.sigma > 0.0) || s.blobs.dims < 1 ||
        !(s.keep_fraction > 0.0 && s.keep_fraction <= 1.0)) {
      throw InvalidArgument("invalid synthetic dataset '" + s.text + "'");
    }
    return s;
  }
  if (text.starts_with("csv:")) {
    s.kind = Kind::csv;
    s.path = std::string(text.substr(4));
    return s;
  }
  if (text.starts_with("cache:")) {
    s.kind = Kind::cache;
    s.path = std::string(text.substr(6));
    return s;
  }
  if (text.ends_with(".csv")) {
    s.kind = Kind::csv;
    s.path = std::string(text);
    return s;
  }
  throw InvalidArgument("unknown dataset source '" + std::string(text) + "'");
}

Dataset load_source(const DatasetSource& source, std::uint64_t seed) {
  switch (source.kind) {
    case DatasetSource::Kind::csv:
      return load_csv(source.path, source.label_column, source.positive_value).data;
    case DatasetSource::Kind::cache:
      return load_dataset(source.path);
    case DatasetSource::Kind::synthetic:
      break;
  }
  Dataset base = generate_blobs(source.blobs, seed);
  if (source.keep_fraction >= 1.0) return base;
  return subsample_positives(base, source.keep_fraction, seed);
}

TrainConfig ExperimentSpec::train_config(std::string_view loss, double beta, ApproximationKind approx,
                                         std::size_t batch_size, std::size_t trial) const {
  TrainConfig c;
  c.batch_size = batch_size;
  c.max_epochs = max_epochs;
  c.window = window;
  c.adam.learning_rate = learning_rate;
  c.dropout = dropout;
  c.seed = seed + trial;
  c.eval_tau_grid = tau_grid;
  c.loss.objective = parse_objective(loss);
  c.loss.beta = loss == "fbeta" ? beta : 1.0;
  c.loss.tau_train = tau;
  c.loss.tau_grid = tau_grid;
  c.loss.delta = delta;
  c.loss.approximation = approx;
  c.loss.average_over_grid = grid_loss;
  return c;
}

OptionMap read_config_file(const std::filesystem::path& path, Command command) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  OptionMap global, section;
  std::string current;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    const std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw InvalidArgument(path.string() + ":" + std::to_string(number) + ": bad section header");
      }
      current = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!known_keys().contains(key)) {
      throw InvalidArgument(path.string() + ":" + std::to_string(number) + ": unknown key '" + key + "'");
    }
    if (current.empty()) {
      global[key] = value;
    } else if (current == to_string(command)) {
      section[key] = value;
    } else {
      parse_command(current);  // reject misspelled sections
    }
  }
  for (auto& [k, v] : section) global[k] = v;
  return global;
}

ExperimentSpec build_spec(Command command, const OptionMap& options) {
  for (const auto& [key, value] : options) {
    if (!known_keys().contains(key)) throw InvalidArgument("unknown option '" + key + "'");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = options.find(key);
    if (it == options.end()) return std::nullopt;
    return it->second;
  };

  ExperimentSpec spec;
  spec.command = command;

  switch (command) {
    case Command::batch_sweep:
      spec.losses = {"f1"};
      spec.batch_sizes = {128, 1024, 2048, 4096};
      spec.trials = 1;
      break;
    case Command::sigmoid_compare:
      spec.losses = {"accuracy", "f1"};
      spec.approximations = {ApproximationKind::piecewise_linear, ApproximationKind::fitted_sigmoid};
      break;
    case Command::fbeta_sweep:
      spec.losses = {"fbeta"};
      break;
    case Command::train:
    case Command::evaluate:
      spec.losses = {"f1"};
      spec.betas = {1.0};
      spec.trials = 1;
      break;
    case Command::loss_grid:
    case Command::dataset:
      break;
  }

  if (auto v = get("dataset")) spec.dataset = DatasetSource::parse(*v);
  if (auto v = get("label-column")) spec.dataset.label_column = *v;
  if (auto v = get("positive-value")) spec.dataset.positive_value = *v;
  if (auto v = get("loss")) {
    spec.losses = split_list(*v);
    for (const auto& l : spec.losses) parse_objective(l);
  }
  if (auto v = get("beta")) {
    spec.betas.clear();
    for (const auto& b : split_list(*v)) spec.betas.push_back(to_double("beta", b));
  }
  if (auto v = get("tau")) spec.tau = to_double("tau", *v);
  if (auto v = get("tau-grid")) {
    spec.tau_grid.clear();
    for (const auto& t : split_list(*v)) spec.tau_grid.push_back(to_double("tau-grid", t));
  }
  if (auto v = get("delta")) spec.delta = to_double("delta", *v);
  if (auto v = get("batch-size")) {
    spec.batch_sizes.clear();
    for (const auto& b : split_list(*v)) spec.batch_sizes.push_back(to_unsigned("batch-size", b));
  }
  if (auto v = get("trials")) spec.trials = to_unsigned("trials", *v);
  if (auto v = get("seed")) spec.seed = to_unsigned("seed", *v);
  if (auto v = get("max-epochs")) spec.max_epochs = to_unsigned("max-epochs", *v);
  if (auto v = get("window")) spec.window = to_unsigned("window", *v);
  if (auto v = get("lr")) spec.learning_rate = to_double("lr", *v);
  if (auto v = get("dropout")) spec.dropout = to_double("dropout", *v);
  if (auto v = get("grid-loss")) spec.grid_loss = as_bool("grid-loss", *v);
  if (auto v = get("approx")) {
    spec.approximations.clear();
    for (const auto& a : split_list(*v)) spec.approximations.push_back(parse_approximation(a));
  }
  if (auto v = get("jobs")) spec.jobs = to_unsigned("jobs", *v);
  if (auto v = get("out")) spec.out = *v;
  if (auto v = get("checkpoint")) spec.checkpoint = *v;
  if (auto v = get("report")) spec.report = *v;
  if (auto v = get("format")) {
    if (*v == "tsv") {
      spec.format = OutputFormat::tsv;
    } else if (*v == "json") {
      spec.format = OutputFormat::json;
    } else {
      throw InvalidArgument("format must be tsv or json, got '" + *v + "'");
    }
  }

  for (double b : spec.betas) {
    if (!(b > 0.0)) throw InvalidArgument("beta must be positive");
  }
  if (spec.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (spec.jobs < 1) throw InvalidArgument("jobs must be at least 1");
  if (spec.losses.empty()) throw InvalidArgument("at least one loss is required");
  if (spec.betas.empty()) throw InvalidArgument("at least one beta is required");
  if (spec.batch_sizes.empty()) throw InvalidArgument("at least one batch size is required");
  if (spec.approximations.empty()) throw InvalidArgument("at least one approximation is required");
  if (!(spec.dropout >= 0.0 && spec.dropout < 1.0)) throw InvalidArgument("dropout must lie in [0, 1)");
  if (command == Command::evaluate && spec.checkpoint.empty()) {
    throw InvalidArgument("evaluate needs --checkpoint");
  }
  // Exercise every training configuration the command will build.
  for (const auto& loss : spec.losses) {
    for (double beta : spec.betas) {
      for (auto approx : spec.approximations) {
        for (auto batch : spec.batch_sizes) spec.train_config(loss, beta, approx, batch, 0).validate();
      }
    }
  }
  return spec;
}

bool ResultTable::has_failures() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.status != "ok"; });
}

const ResultRow& ResultTable::find(std::string_view config, std::string_view loss,
                                   std::string_view metric) const {
  for (const auto& r : rows) {
    if (r.config == config && r.loss == loss && r.metric == metric && r.status == "ok") return r;
  }
  throw InvalidArgument("no row for (" + std::string(config) + ", " + std::string(loss) + ", " +
                        std::string(metric) + ")");
}

std::string to_tsv(const ResultTable& table) {
  std::ostringstream out;
  out << "config\tloss\tmetric\tmean\tstd\ttrials\ttau_policy\tstatus\n";
  for (const auto& r : table.rows) {
    out << r.config << '\t' << r.loss << '\t' << r.metric << '\t' << format_number(r.mean) << '\t'
        << format_number(r.std) << '\t' << r.trials << '\t' << r.tau_policy << '\t' << r.status << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row = {{"config", r.config}, {"loss", r.loss}, {"metric", r.metric},
                          {"trials", r.trials}, {"tau_policy", r.tau_policy}, {"status", r.status}};
    row["mean"] = std::isfinite(r.mean) ? nlohmann::json(r.mean) : nlohmann::json(nullptr);
    row["std"] = std::isfinite(r.std) ? nlohmann::json(r.std) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"experiment", table.experiment}, {"rows", rows}};
}

std::string to_tsv(const MetricTable& table) {
  std::ostringstream out;
  out << "metric\ttau\tvalue\tdefined\texcluded\n";
  for (const auto& v : table.per_tau) {
    out << v.name << '\t' << format_short(v.tau.value_or(0.0)) << '\t' << format_number(v.value)
        << '\t' << (v.defined ? "true" : "false") << "\t0\n";
  }
  for (const auto& s : table.means) {
    out << s.name << "\tmean\t" << format_number(s.mean) << '\t' << (s.defined() ? "true" : "false")
        << '\t' << s.excluded << '\n';
  }
  out << "auroc\trank\t" << format_number(table.auroc.value) << '\t'
      << (table.auroc.defined ? "true" : "false") << "\t0\n";
  return out.str();
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

ResultTable run_loss_grid(const ExperimentSpec& spec) {
  const SplitDataset split = prepare_split(spec);
  ResultTable table;
  table.experiment = "loss-grid";
  const std::vector<std::string> metrics = {"accuracy", "f1", "auroc"};
  for (const auto& loss : spec.losses) {
    const double beta = spec.betas.front();
    try {
      const auto reports = run_trials(spec, split, loss, beta, spec.approximations.front(),
                                      spec.batch_sizes.front());
      add_metric_rows(table, spec.dataset.text, loss_label(loss, beta), reports, metrics);
    } catch (const std::exception& e) {
      add_error_rows(table, spec.dataset.text, loss_label(loss, beta), metrics, spec.trials, e.what());
    }
  }
  return table;
}

ResultTable run_fbeta_sweep(const ExperimentSpec& spec) {
  const SplitDataset split = prepare_split(spec);
  ResultTable table;
  table.experiment = "fbeta-sweep";
  const std::vector<std::string> metrics = {"f1", "precision", "recall"};
  for (double beta : spec.betas) {
    const std::string config = "beta=" + format_short(beta);
    try {
      const auto reports = run_trials(spec, split, "fbeta", beta, spec.approximations.front(),
                                      spec.batch_sizes.front());
      add_metric_rows(table, config, loss_label("fbeta", beta), reports, metrics);
    } catch (const std::exception& e) {
      add_error_rows(table, config, loss_label("fbeta", beta), metrics, spec.trials, e.what());
    }
  }
  return table;
}

ResultTable run_sigmoid_compare(const ExperimentSpec& spec) {
  const SplitDataset split = prepare_split(spec);
  ResultTable table;
  table.experiment = "sigmoid-compare";
  const std::vector<std::string> metrics = {"accuracy", "f1"};
  for (auto approx : spec.approximations) {
    const std::string config = "approx=" + to_string(approx);
    for (const auto& loss : spec.losses) {
      const double beta = spec.betas.front();
      try {
        const auto reports = run_trials(spec, split, loss, beta, approx, spec.batch_sizes.front());
        add_metric_rows(table, config, loss_label(loss, beta), reports, metrics);
      } catch (const std::exception& e) {
        add_error_rows(table, config, loss_label(loss, beta), metrics, spec.trials, e.what());
      }
    }
  }
  return table;
}

ResultTable run_batch_sweep(const ExperimentSpec& spec) {
  const SplitDataset split = prepare_split(spec);
  ResultTable table;
  table.experiment = "batch-sweep";
  const std::string loss = spec.losses.front();
  const double beta = spec.betas.front();
  const double tau = spec.tau;

  auto hard_f1 = [tau](const Vector& p, const std::vector<std::uint8_t>& labels) {
    const LabeledBatch b(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), labels);
    return f_beta(aggregate_hard(b, tau), 1.0, 0.0).value;
  };

  for (std::size_t batch_size : spec.batch_sizes) {
    const std::string config = "batch=" + std::to_string(batch_size);
    try {
      std::vector<double> deviations;
      const BatchObserver observer = [&](const MlpModel& model, const FeatureBatch& batch) {
        const double whole = hard_f1(model.predict(split.train.features), split.train.labels);
        const double part = hard_f1(model.predict(batch.features), batch.labels);
        deviations.push_back(std::abs(part - whole));
      };
      const TrainConfig config_for_run =
          spec.train_config(loss, beta, spec.approximations.front(), batch_size, 0);
      MlpModel model = make_model(split.train.dims(), config_for_run);
      train(model, split, config_for_run, observer);
      const auto [mean, sd] = mean_std(deviations);
      table.rows.push_back({config, loss_label(loss, beta), "abs_f1_deviation", mean, sd, 1,
                            "tau=" + format_short(tau), "ok"});
    } catch (const std::exception& e) {
      table.rows.push_back({config, loss_label(loss, beta), "abs_f1_deviation", std::nan(""),
                            std::nan(""), 1, "tau=" + format_short(tau), std::string("error: ") + e.what()});
    }
  }
  return table;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Train binary classifiers on confusion-matrix metrics and reproduce experiment tables"};
  app.require_subcommand(1);

  OptionMap flags;
  std::string config_path;
  struct Option {
    const char* key;
    const char* help;
  };
  static constexpr Option kOptions[] = {
      {"dataset", "synthetic-50|synthetic-33|synthetic-20|synthetic-imbalanced|synthetic:k=v,..|csv:PATH|cache:PATH"},
      {"loss", "comma list of accuracy,f1,fbeta,auroc,bce"},
      {"beta", "F-beta weight(s), comma list"},
      {"tau", "training threshold"},
      {"tau-grid", "evaluation / AUROC thresholds, comma list"},
      {"delta", "slope parameter of the step approximation"},
      {"batch-size", "batch size(s), comma list"},
      {"trials", "trainings per table cell"},
      {"seed", "base seed"},
      {"out", "output file (default stdout)"},
      {"format", "tsv or json"},
      {"max-epochs", "epoch limit"},
      {"window", "early-stopping window in epochs"},
      {"lr", "ADAM learning rate"},
      {"dropout", "dropout rate of the hidden layers"},
      {"approx", "comma list of linear,sigmoid,lookup"},
      {"label-column", "CSV label column"},
      {"positive-value", "CSV label value of the positive class"},
      {"checkpoint", "model checkpoint to write (train) or read (evaluate)"},
      {"report", "TrainReport JSON (train) or summary JSON (dataset) path"},
      {"jobs", "trials run concurrently"},
  };

  std::vector<CLI::App*> subcommands;
  for (Command c : {Command::train, Command::evaluate, Command::batch_sweep, Command::loss_grid,
                    Command::fbeta_sweep, Command::sigmoid_compare, Command::dataset}) {
    CLI::App* sub = app.add_subcommand(to_string(c));
    sub->add_option("--config", config_path, "key=value config file with [command] sections");
    for (const auto& o : kOptions) {
      const std::string key = o.key;
      sub->add_option_function<std::string>(
          "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, o.help)
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    sub->add_flag_function(
        "--grid-loss", [&flags](std::int64_t) { flags["grid-loss"] = "true"; },
        "average accuracy/F-beta losses over the tau grid");
    subcommands.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  Command command = Command::train;
  for (auto* sub : subcommands) {
    if (sub->parsed()) command = parse_command(sub->get_name());
  }

  ExperimentSpec spec;
  try {
    OptionMap merged;
    if (!config_path.empty()) merged = read_config_file(config_path, command);
    for (const auto& [k, v] : flags) merged[k] = v;
    spec = build_spec(command, merged);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    switch (command) {
      case Command::loss_grid:
      case Command::fbeta_sweep:
      case Command::sigmoid_compare:
      case Command::batch_sweep: {
        ResultTable table;
        if (command == Command::loss_grid) table = run_loss_grid(spec);
        if (command == Command::fbeta_sweep) table = run_fbeta_sweep(spec);
        if (command == Command::sigmoid_compare) table = run_sigmoid_compare(spec);
        if (command == Command::batch_sweep) table = run_batch_sweep(spec);
        write_output(spec, render(spec, table), out);
        if (table.has_failures()) {
          err << "some cells failed; see status column\n";
          return 2;
        }
        return 0;
      }
      case Command::dataset: {
        const Dataset data = load_source(spec.dataset, spec.seed);
        if (!spec.out.empty()) save_dataset(data, spec.out);
        const std::string summary = summary_json(data).dump(2) + "\n";
        if (spec.report.empty()) {
          out << summary;
        } else {
          std::ofstream(spec.report, std::ios::binary | std::ios::trunc) << summary;
        }
        return 0;
      }
      case Command::train:
      case Command::evaluate:
        break;
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  SplitDataset split;
  try {
    split = prepare_split(spec);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    MetricTable metrics;
    if (command == Command::train) {
      const TrainConfig config = spec.train_config(spec.losses.front(), spec.betas.front(),
                                                   spec.approximations.front(),
                                                   spec.batch_sizes.front(), 0);
      MlpModel model = make_model(split.train.dims(), config);
      const TrainReport report = train(model, split, config);
      if (!spec.checkpoint.empty()) save_checkpoint(model, spec.checkpoint);
      if (!spec.report.empty()) {
        std::ofstream(spec.report, std::ios::binary | std::ios::trunc)
            << to_json(report, false).dump(2) << '\n';
      }
      metrics = report.test_metrics;
    } else {
      const MlpModel model = load_checkpoint(spec.checkpoint);
      if (model.input_dim() != split.test.dims()) {
        err << "error: checkpoint expects " << model.input_dim() << " features, dataset has "
            << split.test.dims() << '\n';
        return 1;
      }
      const Vector p = model.predict(split.test.features);
      metrics = evaluate_over_grid(
          LabeledBatch(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                       split.test.labels),
          spec.tau_grid);
    }
    write_output(spec, render(spec, metrics), out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace metricopt
