#pragma once

// Single impulsive measurement: filter a state and scan the outcome
// distribution of the result a.

#include <cstddef>
#include <vector>

#include "qmeasure/oscillator.hpp"
#include "qmeasure/weights.hpp"

namespace qmeasure {

// Which power of the filtered norm the outcome density uses. The default,
// ||psi_a||^2, is the one for which delta_a_eff >= delta_a and the first
// measurement of a width-sigma Gaussian gives sqrt(delta_a^2 + sigma^2).
enum class ProbabilityConvention { norm_squared, norm_fourth };

struct OutcomeDistribution {
  std::vector<double> grid;
  std::vector<double> density; // normalized on grid (trapezoid rule)
  double a_tilde = 0.0;        // mode, parabolically refined
  double delta_a_eff = 0.0;    // sqrt(2 int (a - a_tilde)^2 P(a) da)
};

// Normalizes raw densities sampled on an ascending uniform grid and extracts
// the mode and effective uncertainty. Throws NumericalError when more than
// `boundary_tolerance` of the mass sits in the outer 5% of either end.
OutcomeDistribution summarize_outcomes(std::vector<double> grid, std::vector<double> raw,
                                       double boundary_tolerance = 1e-6);

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

// Position moments of |psi|^2: mean and width sqrt(2 var) (the sigma of a
// Gaussian psi ∝ exp(-x^2 / 2 sigma^2)).
struct Moments {
  double norm2 = 0.0;
  double mean = 0.0;
  double width = 0.0;
};
Moments position_moments(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi);

// c' = W c. Never increases the norm beyond quadrature noise.
EigenState apply_impulsive(const BasisQuadrature& quad, const EigenState& state, const WeightSpec& spec);

struct OutcomeOptions {
  std::size_t points = 801;
  double span_factor = 10.0; // grid half-width in units of the dispersion estimate
  ProbabilityConvention convention = ProbabilityConvention::norm_squared;
};

// P(a) on an explicit ascending uniform grid.
OutcomeDistribution scan_outcomes(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi,
                                  double delta_a, FilterKind kind, std::vector<double> grid,
                                  ProbabilityConvention convention = ProbabilityConvention::norm_squared,
                                  double boundary_tolerance = 1e-6);

// P(a) ∝ ||w_a psi||^2 on a grid centred on the state's mean and spanning
// span_factor * sqrt(delta_a^2 + width^2) either side. Insensitive to the
// normalization of `state`.
OutcomeDistribution outcome_distribution(const BasisQuadrature& quad, const EigenState& state,
                                         double delta_a, FilterKind kind, OutcomeOptions options = {});

} // namespace qmeasure
