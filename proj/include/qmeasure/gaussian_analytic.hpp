#pragma once

// Method A: Gaussian packets psi(x) = exp(-gamma x^2 + b x + c) propagated in
// closed form through free and measured (complex-frequency) segments.

#include <complex>
#include <cstddef>
#include <vector>

#include "qmeasure/stroboscopic.hpp"

namespace qmeasure {

struct Units {
  double mass = 0.5;
  double omega = 1.0;
  double hbar = 1.0;

  double period() const;
  void validate() const; // throws std::invalid_argument
};

struct GaussianPacket {
  cplx gamma{0.5, 0.0};
  cplx b{0.0, 0.0};
  cplx c{0.0, 0.0};

  // exp(-(x - x0)^2 / (2 sigma^2)) with unit norm
  static GaussianPacket from_width(double sigma, double x0 = 0.0);

  double center() const; // <x>
  double width() const;  // (2 Re gamma)^{-1/2}
  double log_norm() const; // log ||psi||
  cplx value(double x) const;
};

struct MeasuredSegmentParams {
  cplx omega_r; // omega_r^2 = omega^2 - i hbar / (tau m da^2)
  double tau = 0.0;
};
MeasuredSegmentParams measured_segment(const Units& u, double tau, double delta_a);

// (m / hbar) / (da^-2 + sigma^-2)
double critical_time(double mass, double hbar, double delta_a, double sigma);

// Exact for every dt; integer multiples of T/2 take the revival map.
GaussianPacket evolve_free(const GaussianPacket& p, double dt, const Units& u);

// Gated segment of duration tau with the measurement centred at a. Throws
// NumericalError if the packet stops being normalizable.
GaussianPacket evolve_measured(const GaussianPacket& p, double tau, double delta_a, double a, const Units& u);

// sqrt(da^2 + sigma^2)
double impulsive_delta_a_eff(double sigma, double delta_a);

struct AnalyticSequence {
  std::vector<double> widths;      // sigma before measurement n = 1..N
  std::vector<double> centers;
  std::vector<double> delta_a_eff; // impulsive_delta_a_eff(widths[n-1], da)
  std::vector<double> log_norms;
  bool converged = false;          // |sigma_{n+1} - sigma_n| / sigma_n < 1e-3 reached
  std::size_t fixed_point_n = 0;   // first such n (0 if never)
};

// Measured segment of length tau then free evolution for dT - tau, repeated.
// Only Gaussian filters are representable; other plans throw
// std::invalid_argument.
AnalyticSequence stroboscopic_widths(double sigma, double x0, const StroboscopicPlan& plan, double tau,
                                     const Units& u);

} // namespace qmeasure
