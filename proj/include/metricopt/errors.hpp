// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace metricopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value or configuration violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Lookup by a threshold that is not part of the table's grid.
class UnknownThreshold : public Error {
 public:
  using Error::Error;
};

/// Iterative least squares could not reach its convergence criterion.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A metric needs a class that is absent from the batch.
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// Matrix or array shapes disagree (including a stale forward cache).
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// The training loss became NaN or infinite.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

/// Input file could not be read or parsed into a usable dataset.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace metricopt
