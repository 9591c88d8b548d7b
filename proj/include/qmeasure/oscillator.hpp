#pragma once

// Harmonic-oscillator energy eigenbasis.
//
// Levels are indexed from 0 (ground state). Eigenfunctions are the
// normalized Hermite functions u_n(x) = <x|n>, evaluated by the three-term
// recurrence on the functions themselves, so no raw Hermite polynomial (and
// no factorial) is ever formed.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qmeasure/quadrature.hpp"

namespace qmeasure {

using cplx = std::complex<double>;

class OscillatorBasis {
public:
  // Throws std::invalid_argument unless mass, omega, hbar > 0 and n_max >= 1.
  OscillatorBasis(double mass, double omega, double hbar, std::size_t n_max);

  double mass() const { return mass_; }
  double omega() const { return omega_; }
  double hbar() const { return hbar_; }
  std::size_t n_max() const { return n_max_; }

  double period() const;
  // sqrt(hbar / (m omega)): width unit of the eigenfunctions
  double length_scale() const;
  // Classical turning point of the highest retained level.
  double turning_point() const;

  bool operator==(const OscillatorBasis&) const = default;

private:
  double mass_;
  double omega_;
  double hbar_;
  std::size_t n_max_;
};

// Coefficient vector over a truncated basis. Post-measurement states are
// deliberately left unnormalized.
struct EigenState {
  OscillatorBasis basis;
  std::vector<cplx> coefficients;

  EigenState(OscillatorBasis b, std::vector<cplx> c);
  static EigenState level(OscillatorBasis b, std::size_t n);

  double norm() const;
  EigenState normalized() const;
};

double energy(const OscillatorBasis& basis, std::size_t n);

// u_n(x); throws std::out_of_range for n >= n_max.
double eigenfunction(const OscillatorBasis& basis, std::size_t n, double x);

// Row-major n_max x xs.size() table of u_n(x_k).
std::vector<double> eigenfunction_table(const OscillatorBasis& basis, std::span<const double> xs);

// exp(-i E_n dt / hbar) for every retained level. Durations that are
// integer multiples of T/2 (to 1e-12 relative) use the exact quarter-turn
// phases, so revivals are exact.
std::vector<cplx> free_phase_factors(const OscillatorBasis& basis, double dt);

EigenState evolve_free(const EigenState& state, double dt);

// psi(x) = sum_l c_l u_l(x) at arbitrary positions.
std::vector<cplx> position_wavefunction(const EigenState& state, std::span<const double> xs);

struct QuadratureOptions {
  std::size_t nodes_per_panel = 20;
  // Half-width of the integration domain; 0 selects the automatic choice
  // max(8 sigma_char, turning point + 8 length scales).
  double half_width = 0.0;
  // 0 selects two oscillation wavelengths of the highest level product.
  double panel_width = 0.0;
};

// Composite Gauss-Legendre rule on [-L, L] with the eigenfunction table
// cached at its nodes. Every overlap integral in the library goes through
// one of these.
class BasisQuadrature {
public:
  // sigma_char: widest spatial feature that must fit in the domain (the
  // initial packet width). Throws NumericalError when the rule does not
  // reproduce orthonormality to 1e-8.
  BasisQuadrature(const OscillatorBasis& basis, double sigma_char, QuadratureOptions options = {});

  const OscillatorBasis& basis() const { return basis_; }
  const PanelRule& rule() const { return rule_; }
  std::span<const double> table() const { return table_; }
  double half_width() const { return rule_.hi(); }

  // max |int u_i u_j dx - delta_ij| over the retained levels.
  double orthonormality_defect() const { return defect_; }

  // psi on the rule nodes
  std::vector<cplx> synthesize(std::span<const cplx> coefficients) const;

  // int u_i(x) f(x) dx from values of f on the rule nodes.
  std::vector<cplx> project(std::span<const cplx> values_on_nodes) const;

  // A state sampled on the rule nodes; the coefficients are kept so that
  // panels refined around breakpoints can be evaluated off-grid.
  struct Sampled {
    std::span<const cplx> coefficients;
    std::vector<cplx> values;
  };
  Sampled sample(std::span<const cplx> coefficients) const;

  // Restricted, breakpoint-aware integrals over [lo, hi]. Panels that do not
  // contain a breakpoint (or lo/hi) reuse the cached node values; the others
  // are split and re-evaluated.
  //   integrate_abs2: int f(x) |psi(x)|^2 dx
  //   project_weighted: int u_i(x) f(x) psi(x) dx
  double integrate_abs2(const Sampled& psi, double lo, double hi,
                        std::span<const double> breakpoints,
                        const std::function<double(double)>& f) const;
  std::vector<cplx> project_weighted(const Sampled& psi, double lo, double hi,
                                     std::span<const double> breakpoints,
                                     const std::function<double(double)>& f) const;

  // Real matrix int u_i f u_j dx (row-major n_max x n_max), same splitting.
  std::vector<double> overlap_matrix(double lo, double hi, std::span<const double> breakpoints,
                                     const std::function<double(double)>& f) const;

private:
  struct Segment {
    std::size_t first_node = 0; // cached run [first_node, last_node)
    std::size_t last_node = 0;
    std::vector<double> x;      // fresh nodes when the run is empty
    std::vector<double> w;
  };
  std::vector<Segment> segments(double lo, double hi, std::span<const double> breakpoints) const;

  OscillatorBasis basis_;
  PanelRule rule_;
  std::vector<double> table_;
  double defect_ = 0.0;
};

struct GaussianProjection {
  EigenState state;          // normalized
  double captured_fraction;  // sum |c_l|^2 of the exact unit-norm packet
};

// psi(x) ∝ exp(-(x - x0)^2 / (2 sigma^2)) expanded over the basis.
// Throws NumericalError when the quadrature misses the packet norm by more
// than 1e-10 (grid too coarse or too narrow).
GaussianProjection project_gaussian(const BasisQuadrature& quad, double sigma, double x0);
GaussianProjection project_gaussian(const OscillatorBasis& basis, double sigma, double x0);

} // namespace qmeasure
