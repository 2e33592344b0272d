// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/surrogate.hpp"

#include <utility>

#include "metricopt/errors.hpp"

namespace metricopt {

StepSurrogate StepSurrogate::fitted_sigmoid(const HeavisideParams& params, const SigmoidFit& fit) {
  if (!(fit.k > 0.0)) throw InvalidArgument("sigmoid fit must have k > 0");
  StepSurrogate s(params);
  s.kind_ = ApproximationKind::fitted_sigmoid;
  s.fit_ = fit;
  return s;
}

StepSurrogate StepSurrogate::tabulated(const HeavisideParams& params,
                                       std::shared_ptr<const LookupTable> table) {
  if (!table) throw InvalidArgument("tabulated surrogate needs a lookup table");
  StepSurrogate s(params);
  s.kind_ = ApproximationKind::lookup_table;
  s.table_column_ = table->tau_index(params.tau());
  s.table_ = std::move(table);
  return s;
}

double StepSurrogate::value(double p) const {
  switch (kind_) {
    case ApproximationKind::fitted_sigmoid:
      return sigmoid_approx(p, fit_);
    case ApproximationKind::lookup_table:
      return table_->cell(table_->p_index(p), table_column_);
    case ApproximationKind::piecewise_linear:
      break;
  }
  return heaviside_approx(p, params_);
}

double StepSurrogate::derivative(double p) const {
  if (kind_ == ApproximationKind::fitted_sigmoid) return sigmoid_approx_grad(p, fit_);
  return heaviside_approx_grad(p, params_);
}

}  // namespace metricopt
