#pragma once

// Impulsive measurement filters and their matrices in the oscillator basis.

#include <string_view>
#include <utility>
#include <vector>

#include "qmeasure/oscillator.hpp"

namespace qmeasure {

enum class FilterKind { gaussian, step };

std::string_view to_string(FilterKind kind);
FilterKind parse_filter_kind(std::string_view text); // throws std::invalid_argument

// gaussian: exp(-(x-a)^2 / (2 da^2)), step: indicator of [a - da, a + da].
// Filter normalization constants are dropped; they cancel in every outcome
// distribution.
struct WeightSpec {
  FilterKind kind = FilterKind::gaussian;
  double center = 0.0;
  double delta_a = 1.0;

  WeightSpec() = default;
  WeightSpec(FilterKind k, double a, double da); // throws unless da > 0
  WeightSpec at(double a) const { return {kind, a, delta_a}; }
};

double evaluate_weight(const WeightSpec& spec, double x);

// Interval outside which the filter vanishes to double precision, and the
// panel breakpoints needed to integrate it accurately against smooth
// functions when panels are `panel_width` wide.
std::pair<double, double> weight_support(const WeightSpec& spec);
std::vector<double> weight_breakpoints(const WeightSpec& spec, double panel_width);

// Measurement coupling kappa = 1 / (2 da^2 tau).
double kappa_from(double delta_a, double tau);

class WMatrix {
public:
  WMatrix(OscillatorBasis basis, WeightSpec spec, std::vector<double> entries, double error_estimate);

  const OscillatorBasis& basis() const { return basis_; }
  const WeightSpec& spec() const { return spec_; }
  std::size_t size() const { return basis_.n_max(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
  std::span<const double> entries() const { return entries_; }
  // max entry difference against a coarser rule
  double error_estimate() const { return error_estimate_; }

private:
  OscillatorBasis basis_;
  WeightSpec spec_;
  std::vector<double> entries_;
  double error_estimate_;
};

// W_ij = int u_i w u_j dx. Throws NumericalError when the estimated
// quadrature error exceeds 1e-8.
WMatrix w_matrix(const BasisQuadrature& quad, const WeightSpec& spec);
WMatrix w_matrix(const OscillatorBasis& basis, const WeightSpec& spec);

// Filter applied to a sampled state, returned as basis coefficients (W c).
std::vector<cplx> apply_weight(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi,
                               const WeightSpec& spec);

// ||w psi||^2 evaluated in position space (untruncated in the outgoing index).
double filtered_norm2(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi,
                      const WeightSpec& spec);

} // namespace qmeasure
