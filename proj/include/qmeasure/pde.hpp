#pragma once

// Method B: the effective Schroedinger equation on a uniform lattice,
//   i hbar dpsi/dt = [-hbar^2/2m d2/dx2 + V(x) - i hbar kappa (x - a)^2] psi,
// with the imaginary term switched on only during measurement gates of
// length tau (kappa = 1 / (2 da^2 tau)). Crank-Nicolson, Dirichlet edges.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmeasure/collapse.hpp"
#include "qmeasure/gaussian_analytic.hpp"
#include "qmeasure/stroboscopic.hpp"

namespace qmeasure {

struct Lattice {
  double x_min = -40.0;
  double x_max = 40.0;
  std::size_t n_points = 6401;
  double dt = 0.001; // free-evolution step

  static Lattice centered(double half_width, std::size_t n_points, double dt);
  double dx() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
  double x(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }
  void validate() const; // throws std::invalid_argument
};

struct GridWavefunction {
  Lattice lattice;
  std::vector<cplx> values;
  double time = 0.0;

  static GridWavefunction gaussian(const Lattice& lattice, double sigma, double x0);

  double norm2() const;  // sum |psi_j|^2 dx
  double mean() const;
  double width() const;  // sqrt(2 var), the sigma of exp(-x^2 / 2 sigma^2)
  // Fraction of the norm within `cells` lattice cells of either edge.
  double boundary_mass(std::size_t cells) const;
};

struct Gate {
  double a = 0.0;
  double delta_a = 1.0;
  double tau = 0.0;
};

std::vector<double> harmonic_potential(const Lattice& lattice, const Units& u);

// H_eff psi with the three-point Laplacian and psi = 0 beyond the edges.
std::vector<cplx> effective_hamiltonian_apply(const GridWavefunction& psi, std::span<const double> potential,
                                              const std::optional<Gate>& gate, const Units& u);

// (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi for a fixed
// tridiagonal H = diag(h) + h_off (shift up + shift down). The LU factors are
// computed once.
class CrankNicolson {
public:
  CrankNicolson(std::vector<cplx> h_diag, cplx h_off, double dt, double hbar);

  // H on lattice points [first, first + count) with an optional gate.
  static CrankNicolson on_window(const Lattice& lattice, std::span<const double> potential, std::size_t first,
                                 std::size_t count, const std::optional<Gate>& gate, double dt, const Units& u);

  std::size_t size() const { return b_diag_.size(); }
  void step(std::span<cplx> psi) const;
  void step(std::span<cplx> psi, std::size_t count) const;

private:
  std::vector<cplx> b_diag_;
  cplx b_off_;
  cplx a_off_;
  std::vector<cplx> inv_pivot_; // 1 / (a_j - a_off c_{j-1})
  std::vector<cplx> upper_;     // c_j
  mutable std::vector<cplx> work_;
};

// A measurement gate at `gate.a`, integrated with `steps` Crank-Nicolson
// steps of tau / steps. Only lattice points within crop_widths * delta_a of
// a are evolved; the rest are set to zero (0 = evolve everything).
GridWavefunction apply_gate(const GridWavefunction& psi, std::span<const double> potential, const Gate& gate,
                            const Units& u, std::size_t steps, double crop_widths = 0.0);

// Free evolution for `duration` with steps no longer than lattice.dt.
GridWavefunction evolve_lattice(const GridWavefunction& psi, std::span<const double> potential, double duration,
                                const Units& u);

struct PdeOptions {
  Lattice lattice;
  std::size_t gate_steps = 200;
  std::size_t outcome_points = 81;
  double span_factor = 10.0;
  double crop_widths = 12.0;
  double boundary_tolerance = 1e-8;
  std::size_t boundary_cells = 64;
  ProbabilityConvention convention = ProbabilityConvention::norm_squared;
  std::size_t threads = 0;
};

struct PdeRecord {
  std::size_t n = 0;
  double delta_a_eff = 0.0;
  double a_tilde = 0.0;
  double norm = 0.0;  // accumulated squared norm of the conditioned state
  double width = 0.0; // before measurement n
  double center = 0.0;
};

// Measurements 1 .. plan.count; the outcome distribution of each comes from
// rerunning its gate over an a-grid. Step filters are rejected. Throws
// NumericalError when more than boundary_tolerance of the norm reaches the
// lattice edges.
std::vector<PdeRecord> run_stroboscopic_pde(const GridWavefunction& initial, const StroboscopicPlan& plan,
                                            double tau, const Units& u, const PdeOptions& options);

// Plain-text snapshot: '#' header lines (time, lattice, free-form
// parameters), then one "x re im" row per lattice point.
void write_checkpoint(std::ostream& out, const GridWavefunction& psi, const std::string& parameters = {});
GridWavefunction read_checkpoint(std::istream& in);

} // namespace qmeasure
