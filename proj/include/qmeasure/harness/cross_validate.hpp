#pragma once

// Pairwise agreement of engines on the same plan points.

#include <cstddef>
#include <string>
#include <vector>

#include "qmeasure/harness/run.hpp"

namespace qmeasure::harness {

struct Comparison {
  Engine first = Engine::A;
  Engine second = Engine::C;
  FilterKind filter = FilterKind::gaussian;
  double dt_over_T = 0.0;
  std::size_t n = 0;
  double value_first = 0.0;
  double value_second = 0.0;
  double relative_difference = 0.0; // |x - y| / ((x + y) / 2)
  double tolerance = 0.0;           // 0.01 asymptotic, 0.10 transient
  bool pass = false;
};

struct ValidationReport {
  RunResult run;
  std::vector<Comparison> comparisons; // asserted points only
  bool passed = false;
};

// Transient region: n <= 4. Asymptotic region: n >= N - 4.
inline constexpr std::size_t kTransientLast = 4;
inline constexpr std::size_t kAsymptoticSpan = 4;
inline constexpr double kTransientTolerance = 0.10;
inline constexpr double kAsymptoticTolerance = 0.01;

// Runs every selected engine and compares each pair. Throws ConfigError
// with fewer than two engines.
ValidationReport cross_validate(const ExperimentConfig& config);

// Same comparison on records already computed.
ValidationReport compare(RunResult run, std::size_t measurements);

} // namespace qmeasure::harness
