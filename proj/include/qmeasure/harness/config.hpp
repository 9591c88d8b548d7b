#pragma once

// Experiment configuration: one JSON document per experiment. Omitted fields
// take the defaults below; unknown keys are rejected.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qmeasure/collapse.hpp"
#include "qmeasure/gaussian_analytic.hpp"
#include "qmeasure/stroboscopic.hpp"
#include "qmeasure/weights.hpp"

namespace qmeasure::harness {

enum class Engine { A, B, C };
std::string_view to_string(Engine e);
Engine parse_engine(std::string_view text); // throws ConfigError

enum class OutputFormat { csv, json, svg };
std::string_view to_string(OutputFormat f);
OutputFormat parse_format(std::string_view text); // throws ConfigError

struct LatticeConfig {
  double half_width = 40.0;
  std::size_t points = 6401;
  double dt_omega = 0.001; // free step times omega
  std::size_t gate_steps = 200;
  std::size_t outcome_points = 81;
};

struct NumericsConfig {
  std::size_t n_max = 160;
  std::size_t nodes_per_panel = 20;
  std::size_t outcome_points = 801;
  double tau_over_T = 1e-5;
  ProbabilityConvention convention = ProbabilityConvention::norm_squared;
  std::size_t threads = 0;
  LatticeConfig lattice;
};

struct SweepConfig {
  std::size_t points = 60;
  double max = 1.5;
  std::vector<double> grid() const; // k * max / points, k = 1..points
};

struct ExperimentConfig {
  std::string name;
  Units units;
  double sigma = 5.0;
  double x0 = 0.0;
  std::vector<FilterKind> filters{FilterKind::gaussian};
  double delta_a = 1.0;
  std::vector<double> dt_over_T{0.5};
  SweepConfig sweep;
  std::size_t measurements = 16;
  ImposedResults results;
  std::vector<Engine> engines{Engine::C};
  NumericsConfig numerics;
  std::filesystem::path output_directory = "qmeasure-out";
  std::vector<OutputFormat> formats{OutputFormat::csv};

  // Cross-field checks (engine B and A need the Gaussian filter, positive
  // numerics, ...). Throws ConfigError.
  void validate() const;

  // Plan for one quiescent time and filter.
  StroboscopicPlan plan(double dt_over_T, FilterKind kind) const;
  double tau() const { return numerics.tau_over_T * units.period(); }
};

// `origin` names the document in diagnostics. Throws ConfigError with the
// JSON path of the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& origin = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully defaulted canonical form; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);

// SHA-256 (hex) of the canonical serialization.
std::string config_hash(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

} // namespace qmeasure::harness
