#include "qmeasure/pde.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qmeasure/error.hpp"
#include "qmeasure/parallel.hpp"
#include "qmeasure/simd/kernels.hpp"

namespace qmeasure {

Lattice Lattice::centered(double half_width, std::size_t n_points, double dt) {
  Lattice l{-half_width, half_width, n_points, dt};
  l.validate();
  return l;
}

void Lattice::validate() const {
  if (!(x_max > x_min)) throw std::invalid_argument("lattice: x_min must be below x_max");
  if (n_points < 3) throw std::invalid_argument("lattice: need at least 3 points");
  if (!(dt > 0.0)) throw std::invalid_argument("lattice: dt must be positive");
}

GridWavefunction GridWavefunction::gaussian(const Lattice& lattice, double sigma, double x0) {
  lattice.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  GridWavefunction psi{lattice, std::vector<cplx>(lattice.n_points), 0.0};
  for (std::size_t j = 1; j + 1 < lattice.n_points; ++j) {
    const double d = lattice.x(j) - x0;
    psi.values[j] = std::exp(-0.5 * d * d / (sigma * sigma));
  }
  const double s = 1.0 / std::sqrt(psi.norm2());
  for (auto& v : psi.values) v *= s;
  return psi;
}

double GridWavefunction::norm2() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * lattice.dx();
}

double GridWavefunction::mean() const {
  double s = 0.0;
  double m = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double p = std::norm(values[j]);
    s += p;
    m += p * lattice.x(j);
  }
  return m / s;
}

double GridWavefunction::width() const {
  const double mu = mean();
  double s = 0.0;
  double v = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double p = std::norm(values[j]);
    const double d = lattice.x(j) - mu;
    s += p;
    v += p * d * d;
  }
  return std::sqrt(2.0 * v / s);
}

double GridWavefunction::boundary_mass(std::size_t cells) const {
  const std::size_t n = values.size();
  cells = std::min(cells, n / 2);
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::norm(values[j]);
    total += p;
    if (j < cells || j >= n - cells) edge += p;
  }
  return total > 0.0 ? edge / total : 0.0;
}

std::vector<double> harmonic_potential(const Lattice& lattice, const Units& u) {
  std::vector<double> v(lattice.n_points);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = lattice.x(j);
    v[j] = 0.5 * u.mass * u.omega * u.omega * x * x;
  }
  return v;
}

namespace {

void check_potential(const Lattice& lattice, std::span<const double> potential) {
  if (potential.size() != lattice.n_points) throw std::invalid_argument("potential size does not match lattice");
}

} // namespace

std::vector<cplx> effective_hamiltonian_apply(const GridWavefunction& psi, std::span<const double> potential,
                                              const std::optional<Gate>& gate, const Units& u) {
  check_potential(psi.lattice, potential);
  const std::size_t n = psi.lattice.n_points;
  const double dx = psi.lattice.dx();
  const double kin = u.hbar * u.hbar / (u.mass * dx * dx);
  std::vector<cplx> d(n);
  const double kappa = gate ? kappa_from(gate->delta_a, gate->tau) : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = kin + potential[j];
    if (gate) {
      const double r = psi.lattice.x(j) - gate->a;
      d[j] -= cplx(0.0, u.hbar * kappa * r * r);
    }
  }
  std::vector<cplx> out(n);
  simd::active().tridiag_apply(d, cplx(-0.5 * kin, 0.0), psi.values, out);
  return out;
}

CrankNicolson::CrankNicolson(std::vector<cplx> h_diag, cplx h_off, double dt, double hbar) {
  if (h_diag.empty()) throw std::invalid_argument("CrankNicolson: empty operator");
  if (!(dt > 0.0)) throw std::invalid_argument("CrankNicolson: dt must be positive");
  const cplx ib(0.0, 0.5 * dt / hbar);
  const std::size_t n = h_diag.size();
  b_diag_.resize(n);
  inv_pivot_.resize(n);
  upper_.resize(n);
  work_.resize(n);
  b_off_ = -ib * h_off;
  a_off_ = ib * h_off;
  cplx prev_upper = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    b_diag_[j] = 1.0 - ib * h_diag[j];
    const cplx pivot = 1.0 + ib * h_diag[j] - (j == 0 ? cplx(0.0) : a_off_ * prev_upper);
    if (!(std::abs(pivot) > 1e-300)) throw NumericalError("Crank-Nicolson: zero pivot in tridiagonal solve");
    inv_pivot_[j] = 1.0 / pivot;
    upper_[j] = a_off_ * inv_pivot_[j];
    prev_upper = upper_[j];
  }
}

CrankNicolson CrankNicolson::on_window(const Lattice& lattice, std::span<const double> potential,
                                       std::size_t first, std::size_t count, const std::optional<Gate>& gate,
                                       double dt, const Units& u) {
  check_potential(lattice, potential);
  if (first + count > lattice.n_points) throw std::out_of_range("CrankNicolson: window outside lattice");
  const double dx = lattice.dx();
  const double kin = u.hbar * u.hbar / (u.mass * dx * dx);
  const double kappa = gate ? kappa_from(gate->delta_a, gate->tau) : 0.0;
  std::vector<cplx> d(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = first + k;
    d[k] = kin + potential[j];
    if (gate) {
      const double r = lattice.x(j) - gate->a;
      d[k] -= cplx(0.0, u.hbar * kappa * r * r);
    }
  }
  return CrankNicolson(std::move(d), cplx(-0.5 * kin, 0.0), dt, u.hbar);
}

void CrankNicolson::step(std::span<cplx> psi) const {
  const std::size_t n = size();
  if (psi.size() != n) throw std::invalid_argument("CrankNicolson: state size mismatch");
  simd::active().tridiag_apply(b_diag_, b_off_, psi, work_);
  cplx y = work_[0] * inv_pivot_[0];
  work_[0] = y;
  for (std::size_t j = 1; j < n; ++j) {
    y = (work_[j] - a_off_ * y) * inv_pivot_[j];
    work_[j] = y;
  }
  psi[n - 1] = work_[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) psi[j] = work_[j] - upper_[j] * psi[j + 1];
}

void CrankNicolson::step(std::span<cplx> psi, std::size_t count) const {
  for (std::size_t s = 0; s < count; ++s) step(psi);
}

GridWavefunction apply_gate(const GridWavefunction& psi, std::span<const double> potential, const Gate& gate,
                            const Units& u, std::size_t steps, double crop_widths) {
  if (steps == 0) throw std::invalid_argument("apply_gate: need at least one step");
  const Lattice& l = psi.lattice;
  std::size_t first = 0;
  std::size_t last = l.n_points;
  if (crop_widths > 0.0) {
    const double lo = gate.a - crop_widths * gate.delta_a;
    const double hi = gate.a + crop_widths * gate.delta_a;
    const double dx = l.dx();
    first = static_cast<std::size_t>(std::clamp(std::ceil((lo - l.x_min) / dx), 0.0, double(l.n_points)));
    last = static_cast<std::size_t>(std::clamp(std::floor((hi - l.x_min) / dx) + 1.0, 0.0, double(l.n_points)));
  }
  GridWavefunction out{l, std::vector<cplx>(l.n_points), psi.time + gate.tau};
  if (last <= first) return out;
  const auto cn = CrankNicolson::on_window(l, potential, first, last - first, gate,
                                           gate.tau / static_cast<double>(steps), u);
  std::span<cplx> window(out.values.data() + first, last - first);
  std::copy(psi.values.begin() + first, psi.values.begin() + last, window.begin());
  cn.step(window, steps);
  return out;
}

GridWavefunction evolve_lattice(const GridWavefunction& psi, std::span<const double> potential, double duration,
                                const Units& u) {
  GridWavefunction out = psi;
  if (!(duration > 0.0)) return out;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / psi.lattice.dt - 1e-9));
  const auto cn = CrankNicolson::on_window(psi.lattice, potential, 0, psi.lattice.n_points, std::nullopt,
                                           duration / static_cast<double>(steps), u);
  cn.step(out.values, steps);
  out.time += duration;
  return out;
}

std::vector<PdeRecord> run_stroboscopic_pde(const GridWavefunction& initial, const StroboscopicPlan& plan,
                                            double tau, const Units& u, const PdeOptions& options) {
  u.validate();
  plan.validate();
  if (plan.kind != FilterKind::gaussian)
    throw std::invalid_argument("method B encodes the Gaussian filter only; step plans are not supported");
  if (!(tau > 0.0) || !(tau < plan.quiescent_time))
    throw std::invalid_argument("method B: need 0 < tau < dT");
  const auto potential = harmonic_potential(initial.lattice, u);

  GridWavefunction state = initial;
  double log_norm2 = 0.0;
  {
    const double n2 = state.norm2();
    if (!(n2 > 0.0)) throw NumericalError("method B: initial state has zero norm");
    for (auto& v : state.values) v /= std::sqrt(n2);
  }

  std::vector<PdeRecord> records;
  for (std::size_t n = 1; n <= plan.count; ++n) {
    const double edge = state.boundary_mass(options.boundary_cells);
    if (edge > options.boundary_tolerance) {
      std::ostringstream msg;
      msg << "method B: boundary mass " << edge << " exceeds " << options.boundary_tolerance
          << " before measurement " << n << " (lattice [" << state.lattice.x_min << ", " << state.lattice.x_max
          << "] too small)";
      throw NumericalError(msg.str());
    }
    const double mu = state.mean();
    const double width = state.width();
    const double span = options.span_factor * std::hypot(plan.delta_a, width);
    auto grid = uniform_grid(mu - span, mu + span, options.outcome_points);
    std::vector<double> raw(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
      const Gate g{grid[i], plan.delta_a, tau};
      const double p = apply_gate(state, potential, g, u, options.gate_steps, options.crop_widths).norm2();
      raw[i] = options.convention == ProbabilityConvention::norm_squared ? p : p * p;
    });
    const auto dist = summarize_outcomes(std::move(grid), std::move(raw));
    records.push_back({n, dist.delta_a_eff, dist.a_tilde, std::exp(log_norm2), width, mu});
    if (n == plan.count) break;

    const Gate g{plan.results(n - 1), plan.delta_a, tau};
    state = apply_gate(state, potential, g, u, options.gate_steps, options.crop_widths);
    const double n2 = state.norm2();
    if (!(n2 > 0.0) || log_norm2 + std::log(n2) < 2.0 * std::log(1e-200))
      throw NumericalError("method B: norm underflow at measurement " + std::to_string(n));
    log_norm2 += std::log(n2);
    for (auto& v : state.values) v /= std::sqrt(n2);
    state = evolve_lattice(state, potential, plan.quiescent_time - tau, u);
  }
  return records;
}

void write_checkpoint(std::ostream& out, const GridWavefunction& psi, const std::string& parameters) {
  const Lattice& l = psi.lattice;
  out << std::setprecision(17);
  out << "# qmeasure lattice wavefunction\n";
  out << "# time " << psi.time << "\n";
  out << "# lattice " << l.x_min << ' ' << l.x_max << ' ' << l.n_points << ' ' << l.dt << "\n";
  if (!parameters.empty()) out << "# parameters " << parameters << "\n";
  out << "# x re im\n";
  for (std::size_t j = 0; j < l.n_points; ++j)
    out << l.x(j) << ' ' << psi.values[j].real() << ' ' << psi.values[j].imag() << "\n";
  if (!out) throw Error("checkpoint: write failed");
}

GridWavefunction read_checkpoint(std::istream& in) {
  GridWavefunction psi;
  bool have_lattice = false;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash;
      std::string key;
      ls >> hash >> key;
      if (key == "time") {
        ls >> psi.time;
      } else if (key == "lattice") {
        ls >> psi.lattice.x_min >> psi.lattice.x_max >> psi.lattice.n_points >> psi.lattice.dt;
        if (!ls) throw Error("checkpoint: malformed lattice header");
        psi.lattice.validate();
        psi.values.assign(psi.lattice.n_points, cplx(0.0));
        have_lattice = true;
      }
      continue;
    }
    if (!have_lattice) throw Error("checkpoint: data before lattice header");
    double x = 0.0;
    double re = 0.0;
    double im = 0.0;
    if (!(ls >> x >> re >> im)) throw Error("checkpoint: malformed row " + std::to_string(row + 1));
    if (row >= psi.values.size()) throw Error("checkpoint: more rows than lattice points");
    psi.values[row++] = cplx(re, im);
  }
  if (!have_lattice) throw Error("checkpoint: missing lattice header");
  if (row != psi.values.size())
    throw Error("checkpoint: expected " + std::to_string(psi.values.size()) + " rows, found " + std::to_string(row));
  return psi;
}

} // namespace qmeasure
