// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

// Partial derivatives of a metric with respect to the four counts.
using CountGrad = SoftCounts;

double dot(const CountGrad& g, const Membership& m) {
  return g.tp * m.tp + g.fp * m.fp + g.fn * m.fn + g.tn * m.tn;
}

CountGrad accuracy_grad(const SoftCounts& c, double eps) {
  const double num = c.tp + c.tn;
  const double den = c.tp + c.tn + c.fp + c.fn + eps;
  const double inv2 = 1.0 / (den * den);
  return {(den - num) * inv2, -num * inv2, -num * inv2, (den - num) * inv2};
}

CountGrad fbeta_grad(const SoftCounts& c, double beta, double eps) {
  const double b2 = beta * beta;
  const double a = 1.0 + b2;
  const double den = a * c.tp + b2 * c.fn + c.fp + eps;
  const double inv2 = 1.0 / (den * den);
  return {a * (b2 * c.fn + c.fp + eps) * inv2, -a * c.tp * inv2, -a * c.tp * b2 * inv2, 0.0};
}

struct RocPoint {
  double fpr;
  double tpr;
  std::size_t source;  // index into the surrogate list; npos for anchors
};

constexpr std::size_t kAnchor = static_cast<std::size_t>(-1);

struct SoftRoc {
  std::vector<SoftCounts> counts;
  std::vector<RocPoint> sorted;  // anchors included
  double area = 0.0;
};

SoftRoc build_soft_roc(const LabeledBatch& batch, std::span<const StepSurrogate> steps, double eps) {
  SoftRoc roc;
  roc.sorted.push_back({0.0, 0.0, kAnchor});
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const SoftCounts c = aggregate_soft(batch, steps[k]);
    roc.counts.push_back(c);
    roc.sorted.push_back({c.fp / (c.fp + c.tn + eps), c.tp / (c.tp + c.fn + eps), k});
  }
  roc.sorted.push_back({1.0, 1.0, kAnchor});
  std::stable_sort(roc.sorted.begin(), roc.sorted.end(), [](const RocPoint& a, const RocPoint& b) {
    if (a.fpr != b.fpr) return a.fpr < b.fpr;
    return a.tpr < b.tpr;
  });
  for (std::size_t j = 1; j < roc.sorted.size(); ++j) {
    const auto& l = roc.sorted[j - 1];
    const auto& r = roc.sorted[j];
    roc.area += (r.fpr - l.fpr) * (l.tpr + r.tpr) / 2.0;
  }
  return roc;
}

void require_both_classes(const LabeledBatch& batch) {
  const std::size_t pos = batch.positives();
  if (pos == 0 || pos == batch.size()) {
    throw UndefinedMetric("soft AUROC needs both classes in the batch");
  }
}

}  // namespace

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::accuracy:
      return "accuracy";
    case Objective::f_beta:
      return "fbeta";
    case Objective::auroc:
      return "auroc";
    case Objective::bce:
      return "bce";
  }
  return "unknown";
}

Objective parse_objective(std::string_view name) {
  if (name == "accuracy") return Objective::accuracy;
  if (name == "f1" || name == "fbeta" || name == "f_beta") return Objective::f_beta;
  if (name == "auroc") return Objective::auroc;
  if (name == "bce") return Objective::bce;
  throw InvalidArgument("unknown loss '" + std::string(name) + "'");
}

std::string to_string(ApproximationKind kind) {
  switch (kind) {
    case ApproximationKind::piecewise_linear:
      return "linear";
    case ApproximationKind::fitted_sigmoid:
      return "sigmoid";
    case ApproximationKind::lookup_table:
      return "lookup";
  }
  return "unknown";
}

ApproximationKind parse_approximation(std::string_view name) {
  if (name == "linear") return ApproximationKind::piecewise_linear;
  if (name == "sigmoid") return ApproximationKind::fitted_sigmoid;
  if (name == "lookup") return ApproximationKind::lookup_table;
  throw InvalidArgument("unknown approximation '" + std::string(name) + "'");
}

void LossConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (tau_grid.empty()) throw InvalidArgument("tau grid must not be empty");
  // HeavisideParams rejects bad tau/delta.
  [[maybe_unused]] const HeavisideParams train(tau_train, delta);
  for (double tau : tau_grid) [[maybe_unused]] const HeavisideParams grid(tau, delta);
}

MetricLoss::MetricLoss(LossConfig config) : config_(std::move(config)) {
  config_.validate();

  std::shared_ptr<const LookupTable> table;
  if (config_.approximation == ApproximationKind::lookup_table) {
    std::vector<double> taus = config_.tau_grid;
    taus.push_back(config_.tau_train);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    table = std::make_shared<const LookupTable>(
        LookupTable::build(config_.lookup_resolution, taus, config_.delta));
  }

  auto make = [&](double tau) {
    const HeavisideParams params(tau, config_.delta);
    switch (config_.approximation) {
      case ApproximationKind::fitted_sigmoid:
        return StepSurrogate::fitted_sigmoid(params, fit_sigmoid(params, config_.sigmoid_grid));
      case ApproximationKind::lookup_table:
        return StepSurrogate::tabulated(params, table);
      case ApproximationKind::piecewise_linear:
        break;
    }
    return StepSurrogate(params);
  };
  train_step_.push_back(make(config_.tau_train));
  for (double tau : config_.tau_grid) grid_steps_.push_back(make(tau));
}

bool MetricLoss::defined_on(const LabeledBatch& batch) const {
  if (config_.objective != Objective::auroc) return true;
  const std::size_t pos = batch.positives();
  return pos > 0 && pos < batch.size();
}

LossResult MetricLoss::evaluate(const LabeledBatch& batch) const {
  switch (config_.objective) {
    case Objective::bce:
      return bce_loss(batch, config_.epsilon);
    case Objective::auroc:
      return auroc(batch);
    case Objective::accuracy:
    case Objective::f_beta:
      break;
  }
  if (config_.average_over_grid) return grid_average(batch);
  return single_threshold(batch, train_step_.front());
}

LossResult MetricLoss::single_threshold(const LabeledBatch& batch, const StepSurrogate& step) const {
  const SoftCounts counts = aggregate_soft(batch, step);
  const double eps = config_.epsilon;
  double metric = 0.0;
  CountGrad g;
  if (config_.objective == Objective::accuracy) {
    metric = accuracy(counts, eps).value;
    g = accuracy_grad(counts, eps);
  } else {
    metric = f_beta(counts, config_.beta, eps).value;
    g = fbeta_grad(counts, config_.beta, eps);
  }
  LossResult out;
  out.loss = 1.0 - metric;
  out.grad.resize(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.grad[i] = -dot(g, soft_membership_grad(batch.prediction(i), batch.label(i), step));
  }
  return out;
}

LossResult MetricLoss::grid_average(const LabeledBatch& batch) const {
  LossResult out;
  out.grad.assign(batch.size(), 0.0);
  const double w = 1.0 / static_cast<double>(grid_steps_.size());
  for (const auto& step : grid_steps_) {
    const LossResult r = single_threshold(batch, step);
    out.loss += w * r.loss;
    for (std::size_t i = 0; i < batch.size(); ++i) out.grad[i] += w * r.grad[i];
  }
  return out;
}

LossResult MetricLoss::auroc(const LabeledBatch& batch) const {
  require_both_classes(batch);
  const double eps = config_.epsilon;
  const SoftRoc roc = build_soft_roc(batch, grid_steps_, eps);

  // d area / d(fpr, tpr) for every grid threshold.
  std::vector<double> d_fpr(grid_steps_.size(), 0.0);
  std::vector<double> d_tpr(grid_steps_.size(), 0.0);
  for (std::size_t j = 1; j + 1 < roc.sorted.size(); ++j) {
    const auto& prev = roc.sorted[j - 1];
    const auto& next = roc.sorted[j + 1];
    const std::size_t k = roc.sorted[j].source;
    d_fpr[k] = (prev.tpr - next.tpr) / 2.0;
    d_tpr[k] = (next.fpr - prev.fpr) / 2.0;
  }

  LossResult out;
  out.loss = 1.0 - roc.area;
  out.grad.assign(batch.size(), 0.0);
  for (std::size_t k = 0; k < grid_steps_.size(); ++k) {
    const SoftCounts& c = roc.counts[k];
    const double tpr_den = c.tp + c.fn + eps;
    const double fpr_den = c.fp + c.tn + eps;
    CountGrad g;
    g.tp = d_tpr[k] * (c.fn + eps) / (tpr_den * tpr_den);
    g.fn = -d_tpr[k] * c.tp / (tpr_den * tpr_den);
    g.fp = d_fpr[k] * (c.tn + eps) / (fpr_den * fpr_den);
    g.tn = -d_fpr[k] * c.fp / (fpr_den * fpr_den);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out.grad[i] -= dot(g, soft_membership_grad(batch.prediction(i), batch.label(i), grid_steps_[k]));
    }
  }
  return out;
}

LossResult fbeta_loss(const LabeledBatch& batch, const LossConfig& config) {
  LossConfig c = config;
  c.objective = Objective::f_beta;
  return MetricLoss(std::move(c)).evaluate(batch);
}

LossResult accuracy_loss(const LabeledBatch& batch, const LossConfig& config) {
  LossConfig c = config;
  c.objective = Objective::accuracy;
  return MetricLoss(std::move(c)).evaluate(batch);
}

LossResult auroc_soft_loss(const LabeledBatch& batch, const LossConfig& config) {
  LossConfig c = config;
  c.objective = Objective::auroc;
  return MetricLoss(std::move(c)).evaluate(batch);
}

LossResult bce_loss(const LabeledBatch& batch, double epsilon) {
  LossResult out;
  out.grad.resize(batch.size());
  const double n = static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double raw = batch.prediction(i);
    const double p = std::clamp(raw, epsilon, 1.0 - epsilon);
    const bool clamped = p != raw;
    if (batch.label(i) == 1) {
      total -= std::log(p);
      out.grad[i] = clamped ? 0.0 : -1.0 / (p * n);
    } else {
      total -= std::log1p(-p);
      out.grad[i] = clamped ? 0.0 : 1.0 / ((1.0 - p) * n);
    }
  }
  out.loss = total / n;
  return out;
}

double soft_auroc(const LabeledBatch& batch, std::span<const StepSurrogate> steps, double epsilon) {
  require_both_classes(batch);
  return build_soft_roc(batch, steps, epsilon).area;
}

}  // namespace metricopt
