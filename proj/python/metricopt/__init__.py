# Copyright 2026 The metricopt Authors
# SPDX-License-Identifier: Apache-2.0
"""Train binary classifiers directly on confusion-matrix metrics."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    DataError,
    InvalidArgument,
    MetricoptError,
    UndefinedMetric,
    UnknownThreshold,
)

DEFAULT_TAU_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
