#pragma once

// Executes the selected engines over an experiment's plan points.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qmeasure/harness/config.hpp"

namespace qmeasure::harness {

struct ResultRecord {
  Engine engine = Engine::C;
  FilterKind filter = FilterKind::gaussian;
  double dt_over_T = 0.0;
  std::size_t n = 0;
  double delta_a = 1.0;
  double delta_a_eff = 0.0;
  double a_tilde = 0.0;
  double norm = 0.0; // squared norm of the conditioned state before measurement n
  std::optional<bool> stabilized; // asymptotic (sweep) points only
  double wall_time = 0.0;         // seconds for the whole plan point
  std::string config_hash;
  nlohmann::json numerics;        // truncation and grid sizes used
};

struct ErrorRecord {
  Engine engine = Engine::C;
  FilterKind filter = FilterKind::gaussian;
  double dt_over_T = 0.0;
  std::string message;
};

struct RunResult {
  std::string config_hash;
  nlohmann::json config;
  std::vector<ResultRecord> records; // sorted by engine, filter, dt_over_T, n
  std::vector<ErrorRecord> errors;
};

// Every measurement n = 1..N for each engine, filter and plan.dt_over_T.
RunResult run(const ExperimentConfig& config);

// Asymptotic point n = N for each engine and filter over the sweep grid.
RunResult sweep(const ExperimentConfig& config);

struct DistributionRow {
  Engine engine = Engine::C;
  FilterKind filter = FilterKind::gaussian;
  double dt_over_T = 0.0;
  std::size_t n = 0;
  double a = 0.0;
  double density = 0.0;
};

struct DistributionResult {
  std::string config_hash;
  nlohmann::json config;
  std::vector<DistributionRow> rows;
  std::vector<ErrorRecord> errors;
};

// P(a) of measurement N for each plan.dt_over_T (engines A and C; engine B
// is a ConfigError).
DistributionResult distribution(const ExperimentConfig& config);

} // namespace qmeasure::harness
