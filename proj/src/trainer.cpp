// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/trainer.hpp"

#include <chrono>
#include <cmath>
#include <span>
#include <string>

#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

LabeledBatch as_batch(const Vector& predictions, const std::vector<std::uint8_t>& labels) {
  return LabeledBatch(std::span<const double>(predictions.data(), static_cast<std::size_t>(predictions.size())),
                      labels);
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidArgument("batch size must be at least 1");
  if (max_epochs < 1) throw InvalidArgument("max epochs must be at least 1");
  if (window < 1) throw InvalidArgument("early-stopping window must be at least 1");
  if (!(adam.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (eval_tau_grid.empty()) throw InvalidArgument("evaluation grid must not be empty");
  for (double tau : eval_tau_grid) {
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("evaluation thresholds must lie in (0, 1)");
  }
  loss.validate();
}

EarlyStopping::EarlyStopping(std::size_t window) : window_(window) {
  if (window_ < 1) throw InvalidArgument("early-stopping window must be at least 1");
}

bool EarlyStopping::observe(double loss) {
  ++epoch_;
  if (loss < best_) {
    best_ = loss;
    best_epoch_ = epoch_;
    stale_ = 0;
  } else {
    ++stale_;
  }
  return stale_ >= window_;
}

MlpModel make_model(std::size_t input_dim, const TrainConfig& config) {
  return MlpModel(input_dim, config.hidden, config.dropout, config.seed);
}

Vector predict_dataset(const MlpModel& model, const Dataset& data) {
  return model.predict(data.features);
}

TrainReport train(MlpModel& model, const SplitDataset& data, const TrainConfig& config,
                  const BatchObserver& observer) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  data.train.require_supervised();
  data.validation.validate();
  if (data.validation.size() == 0) throw DataError("validation split is empty");

  const MetricLoss loss(config.loss);
  {
    const Vector p = model.predict(data.validation.features);
    if (!loss.defined_on(as_batch(p, data.validation.labels))) {
      throw DataError("training objective is undefined on the validation split");
    }
  }

  AdamState optimizer(model, config.adam);
  Engine dropout_rng = make_engine(config.seed, Stream::dropout);
  EarlyStopping stopper(config.window);
  std::vector<DenseLayer> best = model.layers();
  TrainReport report;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t used = 0;
    for (const FeatureBatch& batch : batches(data.train, config.batch_size, config.seed, epoch)) {
      if (observer) observer(model, batch);
      const Vector p = model.forward(batch.features, true, dropout_rng);
      const LabeledBatch labeled = as_batch(p, batch.labels);
      if (!loss.defined_on(labeled)) {
        ++report.skipped_batches;
        continue;
      }
      const LossResult r = loss.evaluate(labeled);
      if (!std::isfinite(r.loss)) {
        throw TrainingDiverged("non-finite training loss at epoch " + std::to_string(epoch));
      }
      model.zero_grad();
      model.backward(r.grad);
      optimizer.step(model);
      if (!model.all_finite()) {
        throw TrainingDiverged("non-finite parameters after update at epoch " + std::to_string(epoch));
      }
      loss_sum += r.loss;
      ++used;
    }

    const Vector pv = model.predict(data.validation.features);
    const double validation_loss = loss.value(as_batch(pv, data.validation.labels));
    if (!std::isfinite(validation_loss)) {
      throw TrainingDiverged("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    report.history.push_back(
        {epoch, used > 0 ? loss_sum / static_cast<double>(used) : 0.0, validation_loss});
    report.stopping_epoch = epoch;

    const bool stop = stopper.observe(validation_loss);
    if (stopper.improved_last()) best = model.layers();
    if (stop) {
      report.early_stopped = true;
      break;
    }
  }

  model.layers() = std::move(best);
  report.best_epoch = stopper.best_epoch();
  report.best_validation_loss = stopper.best_loss();
  const Vector pt = model.predict(data.test.features);
  report.test_metrics = evaluate_over_grid(as_batch(pt, data.test.labels), config.eval_tau_grid);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

nlohmann::json to_json(const MetricTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : table.per_tau) {
    rows.push_back({{"metric", v.name}, {"tau", v.tau.value_or(0.0)}, {"value", v.value},
                    {"defined", v.defined}});
  }
  nlohmann::json means = nlohmann::json::array();
  for (const auto& s : table.means) {
    means.push_back({{"metric", s.name}, {"mean", s.mean}, {"included", s.included},
                     {"excluded", s.excluded}});
  }
  return {{"per_tau", rows},
          {"means", means},
          {"auroc", {{"value", table.auroc.value}, {"defined", table.auroc.defined}}}};
}

nlohmann::json to_json(const TrainReport& report, bool include_timing) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : report.history) {
    history.push_back(
        {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"validation_loss", e.validation_loss}});
  }
  nlohmann::json j = {{"history", history},
                      {"stopping_epoch", report.stopping_epoch},
                      {"best_epoch", report.best_epoch},
                      {"best_validation_loss", report.best_validation_loss},
                      {"early_stopped", report.early_stopped},
                      {"skipped_batches", report.skipped_batches},
                      {"test_metrics", to_json(report.test_metrics)}};
  if (include_timing) j["wall_seconds"] = report.wall_seconds;
  return j;
}

}  // namespace metricopt
