// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

MetricValue ratio(std::string name, double num, double den, double epsilon) {
  MetricValue m;
  m.name = std::move(name);
  m.defined = den > 0.0;
  const double guarded = den + epsilon;
  m.value = guarded > 0.0 ? num / guarded : 0.0;
  return m;
}

}  // namespace

std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  return grid;
}

MetricValue precision(const SoftCounts& c, double epsilon) {
  return ratio("precision", c.tp, c.tp + c.fp, epsilon);
}

MetricValue recall(const SoftCounts& c, double epsilon) {
  return ratio("recall", c.tp, c.tp + c.fn, epsilon);
}

MetricValue accuracy(const SoftCounts& c, double epsilon) {
  return ratio("accuracy", c.tp + c.tn, c.tp + c.tn + c.fp + c.fn, epsilon);
}

MetricValue f_beta(const SoftCounts& c, double beta, double epsilon) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  const double b2 = beta * beta;
  const double weighted_tp = (1.0 + b2) * c.tp;
  return ratio(beta == 1.0 ? "f1" : "f_beta", weighted_tp, weighted_tp + b2 * c.fn + c.fp, epsilon);
}

double auroc_hard(const LabeledBatch& batch) {
  const std::size_t n = batch.size();
  const std::size_t n_pos = batch.positives();
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetric("AUROC needs both classes in the batch");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return batch.prediction(a) < batch.prediction(b); });

  // Mann-Whitney U from mid-ranks.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && batch.prediction(order[j + 1]) == batch.prediction(order[i])) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (batch.label(order[k]) == 1) positive_rank_sum += mid_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

const MetricSummary& MetricTable::summary(std::string_view name) const {
  for (const auto& s : means) {
    if (s.name == name) return s;
  }
  throw InvalidArgument("no metric named '" + std::string(name) + "' in table");
}

double MetricTable::mean(std::string_view name) const {
  if (name == "auroc") return auroc.value;
  return summary(name).mean;
}

MetricTable evaluate_over_grid(const LabeledBatch& batch, std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw InvalidArgument("evaluation needs at least one threshold");
  static constexpr const char* kNames[] = {"accuracy", "precision", "recall", "f1"};

  MetricTable table;
  std::vector<std::vector<MetricValue>> by_metric(4);
  for (double tau : tau_grid) {
    const HardCounts counts = aggregate_hard(batch, tau);
    MetricValue values[] = {accuracy(counts, 0.0), precision(counts, 0.0), recall(counts, 0.0),
                            f_beta(counts, 1.0, 0.0)};
    for (std::size_t m = 0; m < 4; ++m) {
      values[m].tau = tau;
      by_metric[m].push_back(values[m]);
    }
  }
  for (std::size_t m = 0; m < 4; ++m) {
    MetricSummary s;
    s.name = kNames[m];
    double total = 0.0;
    for (const auto& v : by_metric[m]) {
      if (v.defined) {
        total += v.value;
        ++s.included;
      } else {
        ++s.excluded;
      }
      table.per_tau.push_back(v);
    }
    s.mean = s.included > 0 ? total / static_cast<double>(s.included) : 0.0;
    table.means.push_back(s);
  }

  table.auroc.name = "auroc";
  try {
    table.auroc.value = auroc_hard(batch);
  } catch (const UndefinedMetric&) {
    table.auroc.value = 0.0;
    table.auroc.defined = false;
  }
  return table;
}

}  // namespace metricopt
