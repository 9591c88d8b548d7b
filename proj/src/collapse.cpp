#include "qmeasure/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qmeasure/error.hpp"

namespace qmeasure {

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 3) throw std::invalid_argument("uniform_grid: need at least 3 points");
  if (!(hi > lo)) throw std::invalid_argument("uniform_grid: empty interval");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

OutcomeDistribution summarize_outcomes(std::vector<double> grid, std::vector<double> raw,
                                       double boundary_tolerance) {
  const std::size_t n = grid.size();
  if (n < 3 || raw.size() != n) throw std::invalid_argument("summarize_outcomes: grid/density mismatch");
  const double h = grid[1] - grid[0];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(raw[i] >= 0.0) || !std::isfinite(raw[i]))
      throw NumericalError("summarize_outcomes: negative or non-finite density");
    total += (i == 0 || i + 1 == n ? 0.5 : 1.0) * raw[i];
  }
  total *= h;
  if (!(total > 0.0)) throw NumericalError("summarize_outcomes: density vanishes on the whole grid");
  for (double& p : raw) p /= total;

  const std::size_t edge = std::max<std::size_t>(1, n / 20);
  double left = 0.0;
  double right = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    left += 0.5 * h * (raw[i] + raw[i + 1]);
    right += 0.5 * h * (raw[n - 1 - i] + raw[n - 2 - i]);
  }
  if (left > boundary_tolerance || right > boundary_tolerance)
    throw BoundaryMassError("outcome grid too narrow: boundary mass " +
                         std::to_string(std::max(left, right)) + " exceeds " +
                         std::to_string(boundary_tolerance));

  // first maximum wins: ties go to the smaller a
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (raw[i] > raw[imax]) imax = i;
  double mode = grid[imax];
  if (imax > 0 && imax + 1 < n) {
    const double pm = raw[imax - 1];
    const double p0 = raw[imax];
    const double pp = raw[imax + 1];
    const double curvature = pm - 2.0 * p0 + pp;
    if (curvature < 0.0) mode += std::clamp(0.5 * (pm - pp) / curvature, -0.5, 0.5) * h;
  }

  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = grid[i] - mode;
    second += (i == 0 || i + 1 == n ? 0.5 : 1.0) * d * d * raw[i];
  }
  second *= h;

  OutcomeDistribution out;
  out.grid = std::move(grid);
  out.density = std::move(raw);
  out.a_tilde = mode;
  out.delta_a_eff = std::sqrt(2.0 * second);
  return out;
}

Moments position_moments(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi) {
  const double lo = quad.rule().lo();
  const double hi = quad.rule().hi();
  const double m0 = quad.integrate_abs2(psi, lo, hi, {}, [](double) { return 1.0; });
  if (!(m0 > 0.0)) throw NumericalError("position_moments: state has zero norm");
  const double m1 = quad.integrate_abs2(psi, lo, hi, {}, [](double x) { return x; }) / m0;
  const double m2 = quad.integrate_abs2(psi, lo, hi, {}, [m1](double x) { return (x - m1) * (x - m1); }) / m0;
  return {m0, m1, std::sqrt(2.0 * std::max(m2, 0.0))};
}

EigenState apply_impulsive(const BasisQuadrature& quad, const EigenState& state, const WeightSpec& spec) {
  const auto psi = quad.sample(state.coefficients);
  return {state.basis, apply_weight(quad, psi, spec)};
}

OutcomeDistribution scan_outcomes(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi,
                                  double delta_a, FilterKind kind, std::vector<double> grid,
                                  ProbabilityConvention convention, double boundary_tolerance) {
  const WeightSpec base(kind, 0.0, delta_a);
  std::vector<double> raw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = filtered_norm2(quad, psi, base.at(grid[i]));
    raw[i] = convention == ProbabilityConvention::norm_squared ? p : p * p;
  }
  return summarize_outcomes(std::move(grid), std::move(raw), boundary_tolerance);
}

OutcomeDistribution outcome_distribution(const BasisQuadrature& quad, const EigenState& state,
                                         double delta_a, FilterKind kind, OutcomeOptions options) {
  const auto psi = quad.sample(state.coefficients);
  const Moments m = position_moments(quad, psi);
  const double span = options.span_factor * std::sqrt(delta_a * delta_a + m.width * m.width);
  return scan_outcomes(quad, psi, delta_a, kind, uniform_grid(m.mean - span, m.mean + span, options.points),
                       options.convention);
}

} // namespace qmeasure
