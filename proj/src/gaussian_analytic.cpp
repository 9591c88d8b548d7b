#include "qmeasure/gaussian_analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qmeasure/error.hpp"

namespace qmeasure {

double Units::period() const { return 2.0 * std::numbers::pi / omega; }

void Units::validate() const {
  if (!(mass > 0.0) || !(omega > 0.0) || !(hbar > 0.0))
    throw std::invalid_argument("units: mass, omega and hbar must be positive");
}

GaussianPacket GaussianPacket::from_width(double sigma, double x0) {
  if (!(sigma > 0.0)) throw std::invalid_argument("GaussianPacket: sigma must be positive");
  const double g = 0.5 / (sigma * sigma);
  GaussianPacket p;
  p.gamma = g;
  p.b = 2.0 * g * x0;
  // -g (x - x0)^2 = -g x^2 + 2 g x0 x - g x0^2, then normalize
  p.c = -g * x0 * x0 - 0.25 * std::log(std::numbers::pi * sigma * sigma);
  return p;
}

double GaussianPacket::center() const { return b.real() / (2.0 * gamma.real()); }

double GaussianPacket::width() const { return 1.0 / std::sqrt(2.0 * gamma.real()); }

double GaussianPacket::log_norm() const {
  const double g = gamma.real();
  return c.real() + 0.25 * std::log(std::numbers::pi / (2.0 * g)) + b.real() * b.real() / (4.0 * g);
}

cplx GaussianPacket::value(double x) const { return std::exp(-gamma * x * x + b * x + c); }

MeasuredSegmentParams measured_segment(const Units& u, double tau, double delta_a) {
  if (!(tau > 0.0) || !(delta_a > 0.0))
    throw std::invalid_argument("measured_segment: tau and delta_a must be positive");
  const cplx w2(u.omega * u.omega, -u.hbar / (tau * u.mass * delta_a * delta_a));
  return {std::sqrt(w2), tau};
}

double critical_time(double mass, double hbar, double delta_a, double sigma) {
  if (!(delta_a > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("critical_time: delta_a and sigma must be positive");
  return (mass / hbar) / (1.0 / (delta_a * delta_a) + 1.0 / (sigma * sigma));
}

namespace {

// Oscillator propagator of frequency w (possibly complex) for time t acting on
// exp(-gamma x^2 + b x + c). With g = m w / (2 hbar), z = gamma / g and
// D = cos(wt) + i z sin(wt):
//   z' = (z cos + i sin) / D,  b' = b / D,  c' = c + i sin b^2 / (4 g D) - log(D) / 2
GaussianPacket propagate(const GaussianPacket& p, cplx w, double t, double mass, double hbar) {
  const cplx g = mass * w / (2.0 * hbar);
  const cplx z = p.gamma / g;
  const cplx theta = w * t;
  const cplx s = std::sin(theta);
  const cplx co = std::cos(theta);
  const cplx d = co + cplx(0.0, 1.0) * z * s;
  if (std::abs(d) == 0.0) throw NumericalError("gaussian propagator: singular denominator");
  GaussianPacket out;
  out.gamma = g * (z * co + cplx(0.0, 1.0) * s) / d;
  out.b = p.b / d;
  out.c = p.c + cplx(0.0, 1.0) * s * p.b * p.b / (4.0 * g * d) - 0.5 * std::log(d);
  return out;
}

} // namespace

GaussianPacket evolve_free(const GaussianPacket& p, double dt, const Units& u) {
  const double halves = dt / (0.5 * u.period());
  const double k = std::round(halves);
  if (std::abs(halves - k) <= 1e-12 * std::max(1.0, std::abs(halves))) {
    // psi(x, k T/2) = exp(-i k pi / 2) psi((-1)^k x, 0)
    GaussianPacket out = p;
    const bool odd = std::fmod(std::abs(k), 2.0) == 1.0;
    if (odd) out.b = -p.b;
    out.c = p.c + cplx(0.0, -0.5 * std::numbers::pi * std::fmod(k, 4.0));
    return out;
  }
  return propagate(p, cplx(u.omega, 0.0), dt, u.mass, u.hbar);
}

GaussianPacket evolve_measured(const GaussianPacket& p, double tau, double delta_a, double a, const Units& u) {
  const auto seg = measured_segment(u, tau, delta_a);
  const cplx wr2 = seg.omega_r * seg.omega_r;
  const double kappa = kappa_from(delta_a, tau);
  const cplx i(0.0, 1.0);
  // 1/2 m w^2 x^2 - i hbar kappa (x - a)^2 = 1/2 m wr^2 (x - xc)^2 + v0
  const cplx xc = -2.0 * i * u.hbar * kappa * a / (u.mass * wr2);
  const cplx v0 = -i * u.hbar * kappa * a * a - 0.5 * u.mass * wr2 * xc * xc;

  // shift to y = x - xc, propagate, shift back
  GaussianPacket shifted;
  shifted.gamma = p.gamma;
  shifted.b = p.b - 2.0 * p.gamma * xc;
  shifted.c = p.c - p.gamma * xc * xc + p.b * xc;
  const GaussianPacket q = propagate(shifted, seg.omega_r, tau, u.mass, u.hbar);
  GaussianPacket out;
  out.gamma = q.gamma;
  out.b = q.b + 2.0 * q.gamma * xc;
  out.c = q.c - q.gamma * xc * xc - q.b * xc - i * v0 * tau / u.hbar;
  if (!(out.gamma.real() > 0.0) || !std::isfinite(out.gamma.real()))
    throw NumericalError("evolve_measured: packet no longer normalizable (Re gamma = " +
                         std::to_string(out.gamma.real()) + ")");
  return out;
}

double impulsive_delta_a_eff(double sigma, double delta_a) {
  if (!(sigma >= 0.0) || !(delta_a >= 0.0))
    throw std::invalid_argument("impulsive_delta_a_eff: arguments must be non-negative");
  return std::hypot(delta_a, sigma);
}

AnalyticSequence stroboscopic_widths(double sigma, double x0, const StroboscopicPlan& plan, double tau,
                                     const Units& u) {
  u.validate();
  plan.validate();
  if (plan.kind != FilterKind::gaussian)
    throw std::invalid_argument("method A represents Gaussian filters only");
  if (!(tau > 0.0) || !(tau < plan.quiescent_time))
    throw std::invalid_argument("method A: need 0 < tau < dT");
  AnalyticSequence seq;
  GaussianPacket p = GaussianPacket::from_width(sigma, x0);
  for (std::size_t n = 1; n <= plan.count; ++n) {
    seq.widths.push_back(p.width());
    seq.centers.push_back(p.center());
    seq.log_norms.push_back(p.log_norm());
    seq.delta_a_eff.push_back(impulsive_delta_a_eff(p.width(), plan.delta_a));
    if (n > 1 && !seq.converged) {
      const double prev = seq.widths[n - 2];
      if (std::abs(p.width() - prev) / prev < 1e-3) {
        seq.converged = true;
        seq.fixed_point_n = n - 1;
      }
    }
    if (n == plan.count) break;
    p = evolve_measured(p, tau, plan.delta_a, plan.results(n - 1), u);
    p = evolve_free(p, plan.quiescent_time - tau, u);
  }
  return seq;
}

} // namespace qmeasure
