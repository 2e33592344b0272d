// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/confusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

LabeledBatch::LabeledBatch(std::span<const double> predictions, std::span<const std::uint8_t> labels)
    : predictions_(predictions), labels_(labels) {
  if (predictions.empty()) throw InvalidArgument("batch must not be empty");
  if (predictions.size() != labels.size()) {
    throw InvalidArgument("batch has " + std::to_string(predictions.size()) + " predictions but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (double p : predictions) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("prediction outside [0, 1]");
  }
  for (auto y : labels) {
    if (y > 1) throw InvalidArgument("labels must be 0 or 1");
  }
}

std::size_t LabeledBatch::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

double tp_soft(double p, int y, const StepSurrogate& step) {
  const double h = step.value(p);
  return (y == 1 || p < step.tau()) ? h : 1.0 - h;
}

double fp_soft(double p, int y, const StepSurrogate& step) {
  const double h = step.value(p);
  return (y == 0 || p < step.tau()) ? h : 1.0 - h;
}

double fn_soft(double p, int y, const StepSurrogate& step) {
  const double h = step.value(p);
  return (y == 1 || p >= step.tau()) ? 1.0 - h : h;
}

double tn_soft(double p, int y, const StepSurrogate& step) {
  const double h = step.value(p);
  return (y == 0 || p >= step.tau()) ? 1.0 - h : h;
}

Membership soft_membership(double p, int y, const StepSurrogate& step) {
  const double h = step.value(p);
  const bool below = p < step.tau();
  return {
      (y == 1 || below) ? h : 1.0 - h,
      (y == 0 || below) ? h : 1.0 - h,
      (y == 1 || !below) ? 1.0 - h : h,
      (y == 0 || !below) ? 1.0 - h : h,
  };
}

Membership soft_membership_grad(double p, int y, const StepSurrogate& step) {
  const double d = step.derivative(p);
  const bool below = p < step.tau();
  return {
      (y == 1 || below) ? d : -d,
      (y == 0 || below) ? d : -d,
      (y == 1 || !below) ? -d : d,
      (y == 0 || !below) ? -d : d,
  };
}

SoftCounts aggregate_soft(const LabeledBatch& batch, const StepSurrogate& step) {
  CompensatedSum tp, fp, fn, tn;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Membership m = soft_membership(batch.prediction(i), batch.label(i), step);
    tp.add(m.tp);
    fp.add(m.fp);
    fn.add(m.fn);
    tn.add(m.tn);
  }
  return {tp.value(), fp.value(), fn.value(), tn.value()};
}

std::vector<Membership> aggregate_soft_grad(const LabeledBatch& batch, const StepSurrogate& step) {
  std::vector<Membership> grads(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    grads[i] = soft_membership_grad(batch.prediction(i), batch.label(i), step);
  }
  return grads;
}

HardCounts aggregate_hard(const LabeledBatch& batch, double tau) {
  HardCounts c;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const bool predicted = heaviside_exact(batch.prediction(i), tau) == 1;
    const bool actual = batch.label(i) == 1;
    if (predicted && actual) {
      ++c.tp;
    } else if (predicted) {
      ++c.fp;
    } else if (actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

}  // namespace metricopt
