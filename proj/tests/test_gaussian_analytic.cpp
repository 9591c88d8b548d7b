#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qmeasure/gaussian_analytic.hpp"

using namespace qmeasure;

namespace {
const Units kU{};
const double kT = 2.0 * std::numbers::pi;

StroboscopicPlan plan(double dt_over_T, std::size_t count, double delta_a = 1.0) {
  StroboscopicPlan p;
  p.quiescent_time = dt_over_T * kT;
  p.count = count;
  p.delta_a = delta_a;
  return p;
}

bool same(const GaussianPacket& a, const GaussianPacket& b, double tol) {
  return std::abs(a.gamma - b.gamma) < tol && std::abs(a.b - b.b) < tol && std::abs(a.c - b.c) < tol;
}
} // namespace

TEST_CASE("critical time") {
  CHECK(critical_time(0.5, 1.0, 1.0, 5.0) == doctest::Approx(0.5 / (1.0 + 1.0 / 25.0)));
  CHECK(critical_time(0.5, 1.0, 1.0, 5.0) == doctest::Approx(0.48077).epsilon(1e-5));
}

TEST_CASE("packet normalization and moments") {
  const auto p = GaussianPacket::from_width(2.0, 1.5);
  CHECK(p.width() == doctest::Approx(2.0));
  CHECK(p.center() == doctest::Approx(1.5));
  CHECK(p.log_norm() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  const double n2 = oracle::integrate([&](double x) { return std::norm(p.value(x)); }, -30.0, 30.0);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("free evolution composes") {
  const auto p = GaussianPacket::from_width(5.0, 1.0);
  const auto a = evolve_free(evolve_free(p, 0.7, kU), 1.9, kU);
  const auto b = evolve_free(p, 2.6, kU);
  CHECK(same(a, b, 1e-12));
  // revival: a full period only flips the overall sign
  const auto full = evolve_free(p, kT, kU);
  CHECK(std::abs(full.gamma - p.gamma) < 1e-14);
  CHECK(std::abs(full.b - p.b) < 1e-14);
  CHECK(std::abs(std::exp(full.c) + std::exp(p.c)) < 1e-12);
}

TEST_CASE("free evolution matches the eigenbasis propagator") {
  const OscillatorBasis basis(0.5, 1.0, 1.0, 160);
  const auto g = project_gaussian(basis, 5.0, 1.0);
  const auto p = GaussianPacket::from_width(5.0, 1.0);
  // the 160-level projection of this packet is itself off by ~1e-7
  for (double t : {0.0, 0.4, 1.3, kT / 4.0, 2.9}) {
    const auto q = evolve_free(p, t, kU);
    const auto s = evolve_free(g.state, t);
    std::vector<double> xs{-4.0, -1.0, 0.0, 0.5, 3.0, 7.0};
    const auto ref = position_wavefunction(s, xs);
    for (std::size_t k = 0; k < xs.size(); ++k) CHECK(std::abs(q.value(xs[k]) - ref[k]) < 1e-6);
  }
}

TEST_CASE("a short measured segment imposes the impulsive width law") {
  const double sigma = 5.0, da = 1.0, a = 0.7, tau = 1e-7;
  const auto p = GaussianPacket::from_width(sigma, 0.0);
  const auto q = evolve_measured(p, tau, da, a, kU);
  // |psi|^2 picks up exp(-(x-a)^2 / da^2)
  const double expected = 1.0 / std::sqrt(1.0 / (sigma * sigma) + 1.0 / (da * da));
  CHECK(q.width() == doctest::Approx(expected).epsilon(1e-6));
  CHECK(q.center() == doctest::Approx(a * sigma * sigma / (sigma * sigma + da * da)).epsilon(1e-6));
  CHECK(impulsive_delta_a_eff(sigma, da) == doctest::Approx(std::sqrt(26.0)));
  const auto seg = measured_segment(kU, 0.5, 2.0);
  CHECK(std::abs(seg.omega_r * seg.omega_r - cplx(1.0, -1.0 / (0.5 * 0.5 * 4.0))) < 1e-12);
}

TEST_CASE("sequence results do not depend on tau once it is short") {
  const auto p = plan(0.3, 16);
  const auto a = stroboscopic_widths(5.0, 0.0, p, 1e-5 * kT, kU);
  const auto b = stroboscopic_widths(5.0, 0.0, p, 1e-4 * kT, kU);
  REQUIRE(a.delta_a_eff.size() == 16);
  for (std::size_t n = 0; n < 16; ++n) CHECK(a.delta_a_eff[n] == doctest::Approx(b.delta_a_eff[n]).epsilon(2e-4));
  CHECK(a.delta_a_eff[0] == doctest::Approx(std::sqrt(26.0)).epsilon(1e-6));
}

TEST_CASE("huge filters leave the free width oscillation intact") {
  const auto p = plan(0.25, 5, 1e6);
  const auto s = stroboscopic_widths(5.0, 0.0, p, 1e-5 * kT, kU);
  // sigma = 5 in units where the ground width is sqrt(2): a quarter period maps it to 2 / 5
  CHECK(s.widths[0] == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(s.widths[1] == doctest::Approx(2.0 / 5.0).epsilon(1e-6));
  CHECK(s.widths[2] == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("QND sequence narrows as repeated filtering of one packet") {
  // revivals undo the free motion, so 1 / sigma_n^2 = 1 / sigma^2 + (n - 1) / da^2
  const auto s = stroboscopic_widths(5.0, 0.0, plan(0.5, 16), 1e-5 * kT, kU);
  for (std::size_t n = 1; n <= 16; ++n)
    CHECK(s.widths[n - 1] == doctest::Approx(1.0 / std::sqrt(1.0 / 25.0 + static_cast<double>(n - 1))).epsilon(1e-4));
  CHECK(s.delta_a_eff.back() < 1.1);
  CHECK_FALSE(s.converged);
}

TEST_CASE("non-QND sequence reaches a fixed point") {
  const auto s = stroboscopic_widths(5.0, 0.0, plan(0.3, 40), 1e-5 * kT, kU);
  CHECK(s.converged);
  CHECK(s.fixed_point_n > 1);
  CHECK(s.delta_a_eff.back() == doctest::Approx(s.delta_a_eff[s.delta_a_eff.size() - 2]).epsilon(1e-3));
}

TEST_CASE("step filters and bad taus are rejected") {
  auto p = plan(0.5, 4);
  p.kind = FilterKind::step;
  CHECK_THROWS_AS(stroboscopic_widths(5.0, 0.0, p, 1e-5, kU), std::invalid_argument);
  CHECK_THROWS_AS(stroboscopic_widths(5.0, 0.0, plan(0.5, 4), 4.0, kU), std::invalid_argument);
  CHECK_THROWS_AS((Units{0.0, 1.0, 1.0}.validate()), std::invalid_argument);
}
