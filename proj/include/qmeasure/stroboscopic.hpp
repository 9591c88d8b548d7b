#pragma once

// Method C: chains of impulsive measurements separated by free evolution,
// computed in the truncated oscillator eigenbasis.
//
// Measurements are numbered from 1. Measurement n happens at t_0 + (n-1) dT
// and its outcome distribution is conditioned on the imposed results
// a_0 .. a_{n-2} of the earlier ones.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmeasure/collapse.hpp"
#include "qmeasure/oscillator.hpp"
#include "qmeasure/weights.hpp"

namespace qmeasure {

struct ImposedResults {
  enum class Policy { constant, alternating, listed };
  Policy policy = Policy::constant;
  double a0 = 0.0;
  std::vector<double> listed;

  // a_k, k = 0, 1, ...; constant: a0, alternating: (-1)^k a0.
  // Throws std::out_of_range past the end of a listed sequence.
  double operator()(std::size_t k) const;
};

struct StroboscopicPlan {
  double quiescent_time = 0.0; // dT
  std::size_t count = 16;      // index of the target measurement
  ImposedResults results;
  FilterKind kind = FilterKind::gaussian;
  double delta_a = 1.0;
  double a_max = 0.0; // outcome grid is [-a_max, a_max]; 0 = automatic two-pass choice

  void validate() const; // throws std::invalid_argument
};

struct EngineOptions {
  std::size_t outcome_points = 801;
  ProbabilityConvention convention = ProbabilityConvention::norm_squared;
  double boundary_tolerance = 1e-6;
  std::size_t threads = 0; // sweep workers, 0 = hardware concurrency
};

struct SequencePoint {
  std::size_t n = 0;
  double delta_a_eff = 0.0;
  double a_tilde = 0.0;
  double norm = 0.0; // ||B c||^2 of the conditioned state before measurement n
};

struct AsymptoticResult {
  std::size_t n = 0;
  double delta_a_eff = 0.0;
  double a_tilde = 0.0;
  double earlier = 0.0; // value at n - 2
  bool stabilized = false;
  double norm = 0.0;    // as in SequencePoint
};

struct UncertaintyCurve {
  struct Point {
    double dt_over_T = 0.0;
    double ratio = 0.0; // delta_a_eff^as / delta_a
    AsymptoticResult asymptote;
    std::optional<std::string> error;
  };
  FilterKind kind = FilterKind::gaussian;
  double delta_a = 1.0;
  std::vector<Point> points;
};

// Unnormalized W(final_a) D W(a_{N-2}) ... D W(a_0) c: N = plan.count
// filters, D = free evolution over dT. Throws NumericalError when the norm
// underflows 1e-200.
EigenState b_apply(const BasisQuadrature& quad, const StroboscopicPlan& plan, const EigenState& state,
                   double final_a);

// (hbar / m omega) sin(omega dT); exactly zero at multiples of T/2.
double qnd_commutator(const OscillatorBasis& basis, double dt);

class StroboscopicEngine {
public:
  // Gaussian initial packet of width sigma centred at x0. Throws
  // NumericalError when the basis captures less than 0.999 of it.
  StroboscopicEngine(const OscillatorBasis& basis, double sigma, double x0, EngineOptions options = {},
                     QuadratureOptions quadrature = {});
  StroboscopicEngine(std::shared_ptr<const BasisQuadrature> quad, EigenState initial,
                     EngineOptions options = {});

  const BasisQuadrature& quadrature() const { return *quad_; }
  const EigenState& initial_state() const { return initial_; }
  double captured_fraction() const { return captured_; }
  const EngineOptions& options() const { return options_; }

  EigenState b_apply(const StroboscopicPlan& plan, double final_a) const;

  // Distribution of measurement plan.count.
  OutcomeDistribution nth_outcome_distribution(const StroboscopicPlan& plan) const;

  // Measurements 1 .. plan.count.
  std::vector<SequencePoint> uncertainty_sequence(const StroboscopicPlan& plan) const;

  // Measurement n_asym (>= 8) with the |D(n) - D(n-2)| / D(n) < 0.01 flag.
  AsymptoticResult asymptotic_uncertainty(StroboscopicPlan plan, std::size_t n_asym = 16) const;

  // One asymptotic point per dT/T, in the given order. Failing points carry
  // their error message; the sweep continues.
  UncertaintyCurve sweep_quiescent_time(std::span<const double> dt_over_T, const StroboscopicPlan& base,
                                        std::size_t n_asym = 16) const;

  // Default sweep grid: k * 0.025 for k = 1..60.
  static std::vector<double> default_sweep_grid(std::size_t points = 60, double max = 1.5);

private:
  OutcomeDistribution scan(const EigenState& prior, const StroboscopicPlan& plan) const;

  std::shared_ptr<const BasisQuadrature> quad_;
  EigenState initial_;
  double captured_ = 1.0;
  EngineOptions options_;
};

} // namespace qmeasure
