#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qmeasure/error.hpp"
#include "qmeasure/pde.hpp"

using namespace qmeasure;

namespace {
const Units kU{};
const double kT = 2.0 * std::numbers::pi;
const Lattice kSmall = Lattice::centered(20.0, 1601, 0.001);

double energy_expectation(const GridWavefunction& psi, const std::vector<double>& v) {
  const auto h = effective_hamiltonian_apply(psi, v, std::nullopt, kU);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < psi.values.size(); ++j) acc += std::conj(psi.values[j]) * h[j];
  return (acc * psi.lattice.dx()).real() / psi.norm2();
}
} // namespace

TEST_CASE("lattice geometry") {
  CHECK(kSmall.dx() == doctest::Approx(0.025));
  CHECK(kSmall.x(0) == doctest::Approx(-20.0));
  CHECK(kSmall.x(1600) == doctest::Approx(20.0));
  CHECK_THROWS_AS((Lattice{1.0, -1.0, 10, 0.1}.validate()), std::invalid_argument);
}

TEST_CASE("Crank-Nicolson conserves the norm without a gate") {
  auto psi = GridWavefunction::gaussian(kSmall, 1.5, 2.0);
  const auto v = harmonic_potential(kSmall, kU);
  const auto cn = CrankNicolson::on_window(kSmall, v, 0, kSmall.n_points, std::nullopt, kSmall.dt, kU);
  const double before = psi.norm2();
  cn.step(psi.values, 1000);
  CHECK(std::abs(psi.norm2() - before) < 1e-10);
}

TEST_CASE("ground-state energy and stationarity") {
  const auto v = harmonic_potential(kSmall, kU);
  const auto ground = GridWavefunction::gaussian(kSmall, std::sqrt(2.0), 0.0);
  CHECK(energy_expectation(ground, v) == doctest::Approx(0.5).epsilon(1e-3));
  const auto later = evolve_lattice(ground, v, 1.0, kU);
  double worst = 0.0;
  for (std::size_t j = 0; j < later.values.size(); ++j)
    worst = std::max(worst, std::abs(std::abs(later.values[j]) - std::abs(ground.values[j])));
  CHECK(worst < 1e-4);
  CHECK(later.time == doctest::Approx(1.0));
}

TEST_CASE("a wide packet contracts to 2/sigma after a quarter period") {
  const auto v = harmonic_potential(kSmall, kU);
  const auto psi = GridWavefunction::gaussian(kSmall, 5.0, 0.0);
  const auto q = evolve_lattice(psi, v, kT / 4.0, kU);
  CHECK(q.width() == doctest::Approx(0.4).epsilon(1e-2));
  const auto h = evolve_lattice(psi, v, kT / 2.0, kU);
  CHECK(h.width() == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("short gate reproduces the impulsive filter") {
  const auto v = harmonic_potential(kSmall, kU);
  const auto psi = GridWavefunction::gaussian(kSmall, 2.0, 0.5);
  const Gate gate{0.7, 1.0, 1e-5 * kT};
  const auto gated = apply_gate(psi, v, gate, kU, 200);
  // eigenbasis reference
  const OscillatorBasis basis(0.5, 1.0, 1.0, 160);
  const BasisQuadrature quad(basis, 5.0);
  const auto g = project_gaussian(quad, 2.0, 0.5);
  const auto filtered = apply_impulsive(quad, g.state, WeightSpec(FilterKind::gaussian, 0.7, 1.0));
  std::vector<double> xs;
  for (std::size_t j = 0; j < kSmall.n_points; j += 40) xs.push_back(kSmall.x(j));
  const auto ref = position_wavefunction(filtered, xs);
  const double scale = std::sqrt(psi.norm2());
  double worst = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k)
    worst = std::max(worst, std::abs(gated.values[40 * k] / scale - ref[k]));
  CHECK(worst < 1e-3);
  CHECK(gated.norm2() < psi.norm2());
}

TEST_CASE("measurement term is absorbing") {
  const auto v = harmonic_potential(kSmall, kU);
  const auto psi = GridWavefunction::gaussian(kSmall, 2.0, 0.0);
  const auto h = effective_hamiltonian_apply(psi, v, Gate{1.0, 1.0, 0.01}, kU);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) acc += std::conj(psi.values[j]) * h[j];
  // <H_eff> = <H> - i hbar kappa <(x - a)^2>
  CHECK(acc.imag() < 0.0);
  double expect = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) expect += std::norm(psi.values[j]) * std::pow(kSmall.x(j) - 1.0, 2);
  const double kappa = 1.0 / (2.0 * 0.01);
  CHECK(acc.imag() == doctest::Approx(-kappa * expect).epsilon(1e-10));
}

TEST_CASE("first measurement and one QND step on the default lattice") {
  PdeOptions opts;
  StroboscopicPlan p;
  p.quiescent_time = 0.5 * kT;
  p.count = 3;
  const auto psi = GridWavefunction::gaussian(opts.lattice, 5.0, 0.0);
  const auto recs = run_stroboscopic_pde(psi, p, 1e-5 * kT, kU, opts);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].delta_a_eff == doctest::Approx(std::sqrt(26.0)).epsilon(1e-2));
  const auto a = stroboscopic_widths(5.0, 0.0, p, 1e-5 * kT, kU);
  for (std::size_t n = 0; n < 3; ++n) CHECK(recs[n].delta_a_eff == doctest::Approx(a.delta_a_eff[n]).epsilon(1e-2));
}

TEST_CASE("step filters and packets touching the edges are rejected") {
  PdeOptions opts;
  opts.lattice = kSmall;
  StroboscopicPlan p;
  p.quiescent_time = 0.5 * kT;
  p.count = 2;
  p.kind = FilterKind::step;
  const auto psi = GridWavefunction::gaussian(kSmall, 2.0, 0.0);
  CHECK_THROWS_AS(run_stroboscopic_pde(psi, p, 1e-5, kU, opts), std::invalid_argument);
  p.kind = FilterKind::gaussian;
  const auto wide = GridWavefunction::gaussian(kSmall, 8.0, 0.0);
  CHECK_THROWS_AS(run_stroboscopic_pde(wide, p, 1e-5, kU, opts), NumericalError);
}

TEST_CASE("checkpoint round trip") {
  auto psi = GridWavefunction::gaussian(Lattice::centered(5.0, 101, 0.01), 1.0, 0.3);
  psi.values[17] = cplx(0.125, -3.5e-7);
  psi.time = 2.75;
  std::stringstream ss;
  write_checkpoint(ss, psi, "sigma=1 x0=0.3");
  CHECK(ss.str().find("\n# time 2.75\n") != std::string::npos);
  const auto back = read_checkpoint(ss);
  CHECK(back.time == psi.time);
  CHECK(back.lattice.n_points == psi.lattice.n_points);
  CHECK(back.lattice.x_min == psi.lattice.x_min);
  CHECK(back.lattice.dt == psi.lattice.dt);
  for (std::size_t j = 0; j < psi.values.size(); ++j) CHECK(back.values[j] == psi.values[j]);
  std::stringstream bad("# time 1\nnot a row\n");
  CHECK_THROWS(read_checkpoint(bad));
}
