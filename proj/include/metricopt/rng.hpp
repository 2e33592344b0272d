// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace metricopt {

using Engine = std::mt19937_64;

/// Independent stream identifiers so that one user seed never feeds two
/// consumers the same sequence.
enum class Stream : std::uint64_t {
  data = 1,
  subsample = 2,
  split = 3,
  init = 4,
  shuffle = 5,
  dropout = 6,
};

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t sub = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(sub),
                    static_cast<std::uint32_t>(sub >> 32)};
  return Engine(seq);
}

}  // namespace metricopt
