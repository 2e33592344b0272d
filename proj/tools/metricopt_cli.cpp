// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "metricopt/experiments.hpp"

int main(int argc, char** argv) { return metricopt::run_cli(argc, argv, std::cout, std::cerr); }
