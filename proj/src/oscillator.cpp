#include "qmeasure/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qmeasure/error.hpp"
#include "qmeasure/simd/kernels.hpp"

namespace qmeasure {

OscillatorBasis::OscillatorBasis(double mass, double omega, double hbar, std::size_t n_max)
    : mass_(mass), omega_(omega), hbar_(hbar), n_max_(n_max) {
  if (!(mass > 0.0) || !(omega > 0.0) || !(hbar > 0.0) || !std::isfinite(mass) ||
      !std::isfinite(omega) || !std::isfinite(hbar))
    throw std::invalid_argument("OscillatorBasis: mass, omega and hbar must be finite and positive");
  if (n_max < 1) throw std::invalid_argument("OscillatorBasis: n_max must be at least 1");
}

double OscillatorBasis::period() const { return 2.0 * std::numbers::pi / omega_; }

double OscillatorBasis::length_scale() const { return std::sqrt(hbar_ / (mass_ * omega_)); }

double OscillatorBasis::turning_point() const {
  return length_scale() * std::sqrt(2.0 * static_cast<double>(n_max_ - 1) + 1.0);
}

EigenState::EigenState(OscillatorBasis b, std::vector<cplx> c)
    : basis(b), coefficients(std::move(c)) {
  if (coefficients.size() != basis.n_max())
    throw std::invalid_argument("EigenState: coefficient count must equal n_max");
}

EigenState EigenState::level(OscillatorBasis b, std::size_t n) {
  if (n >= b.n_max()) throw std::out_of_range("EigenState::level: index beyond truncation");
  std::vector<cplx> c(b.n_max(), 0.0);
  c[n] = 1.0;
  return {b, std::move(c)};
}

double EigenState::norm() const {
  double acc = 0.0;
  for (const cplx& c : coefficients) acc += std::norm(c);
  return std::sqrt(acc);
}

EigenState EigenState::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a state of zero or non-finite norm");
  EigenState out = *this;
  for (cplx& c : out.coefficients) c /= n;
  return out;
}

double energy(const OscillatorBasis& basis, std::size_t n) {
  return basis.hbar() * basis.omega() * (static_cast<double>(n) + 0.5);
}

std::vector<double> eigenfunction_table(const OscillatorBasis& basis, std::span<const double> xs) {
  const std::size_t n_max = basis.n_max();
  const std::size_t count = xs.size();
  std::vector<double> table(n_max * count);
  std::vector<double> y(count);
  const double inv_len = 1.0 / basis.length_scale();
  const double prefactor = std::pow(inv_len * inv_len / std::numbers::pi, 0.25);
  for (std::size_t k = 0; k < count; ++k) {
    y[k] = xs[k] * inv_len;
    table[k] = prefactor * std::exp(-0.5 * y[k] * y[k]);
  }
  if (n_max == 1) return table;
  for (std::size_t k = 0; k < count; ++k) table[count + k] = std::sqrt(2.0) * y[k] * table[k];

  const auto& kernels = simd::active();
  for (std::size_t n = 2; n < n_max; ++n) {
    const double a = std::sqrt(2.0 / static_cast<double>(n));
    const double b = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n));
    std::span<double> all(table);
    kernels.hermite_step(a, b, y, all.subspan((n - 1) * count, count),
                         all.subspan((n - 2) * count, count), all.subspan(n * count, count));
  }
  return table;
}

double eigenfunction(const OscillatorBasis& basis, std::size_t n, double x) {
  if (n >= basis.n_max())
    throw std::out_of_range("eigenfunction: level " + std::to_string(n) + " beyond n_max");
  const double y = x / basis.length_scale();
  const double len = basis.length_scale();
  double prev2 = std::pow(1.0 / (len * len * std::numbers::pi), 0.25) * std::exp(-0.5 * y * y);
  if (n == 0) return prev2;
  double prev = std::sqrt(2.0) * y * prev2;
  for (std::size_t k = 2; k <= n; ++k) {
    const double next = std::sqrt(2.0 / static_cast<double>(k)) * y * prev -
                        std::sqrt(static_cast<double>(k - 1) / static_cast<double>(k)) * prev2;
    prev2 = prev;
    prev = next;
  }
  return prev;
}

std::vector<cplx> free_phase_factors(const OscillatorBasis& basis, double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("free_phase_factors: duration must be non-negative");
  const std::size_t n_max = basis.n_max();
  std::vector<cplx> phases(n_max);
  const double theta = basis.omega() * dt; // phase of level n is -(n + 1/2) theta
  const double half_turns = theta / std::numbers::pi;
  const double nearest = std::round(half_turns);
  if (std::abs(half_turns - nearest) <= 1e-12 * std::max(1.0, std::abs(half_turns))) {
    // -(2n+1) k pi/2 in quarter turns
    static constexpr cplx quarter[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    const auto k = static_cast<long long>(nearest);
    for (std::size_t n = 0; n < n_max; ++n) {
      const long long q = ((2 * static_cast<long long>(n) + 1) * k) % 4;
      phases[n] = quarter[q];
    }
    return phases;
  }
  for (std::size_t n = 0; n < n_max; ++n)
    phases[n] = std::polar(1.0, -(static_cast<double>(n) + 0.5) * theta);
  return phases;
}

EigenState evolve_free(const EigenState& state, double dt) {
  const auto phases = free_phase_factors(state.basis, dt);
  EigenState out = state;
  for (std::size_t n = 0; n < phases.size(); ++n) out.coefficients[n] *= phases[n];
  return out;
}

std::vector<cplx> position_wavefunction(const EigenState& state, std::span<const double> xs) {
  const auto table = eigenfunction_table(state.basis, xs);
  std::vector<cplx> psi(xs.size());
  simd::active().real_matvec_t(table, state.basis.n_max(), xs.size(), xs.size(),
                               state.coefficients, psi);
  return psi;
}

namespace {

double default_half_width(const OscillatorBasis& basis, double sigma_char) {
  return std::max(8.0 * sigma_char, basis.turning_point() + 8.0 * basis.length_scale());
}

double default_panel_width(const OscillatorBasis& basis) {
  // product u_i u_j oscillates with wavelength ~ pi * len / sqrt(2 n + 1)
  const double wavelength = std::numbers::pi * basis.length_scale() /
                            std::sqrt(2.0 * static_cast<double>(basis.n_max()) + 1.0);
  return std::min(2.0 * wavelength, basis.length_scale());
}

} // namespace

BasisQuadrature::BasisQuadrature(const OscillatorBasis& basis, double sigma_char,
                                 QuadratureOptions options)
    : basis_(basis),
      rule_([&] {
        if (!(sigma_char > 0.0)) throw std::invalid_argument("BasisQuadrature: sigma_char must be positive");
        const double half = options.half_width > 0.0 ? options.half_width
                                                     : default_half_width(basis, sigma_char);
        const double panel = options.panel_width > 0.0 ? options.panel_width
                                                       : default_panel_width(basis);
        return PanelRule(-half, half, panel, options.nodes_per_panel);
      }()),
      table_(eigenfunction_table(basis, rule_.nodes())) {
  const std::size_t n = basis_.n_max();
  const std::size_t count = rule_.size();
  const auto w = rule_.weights();
  std::vector<double> weighted(count);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ui = table_.data() + i * count;
    for (std::size_t k = 0; k < count; ++k) weighted[k] = w[k] * ui[k];
    for (std::size_t j = i; j < n; ++j) {
      const double* uj = table_.data() + j * count;
      double acc = 0.0;
      for (std::size_t k = 0; k < count; ++k) acc += weighted[k] * uj[k];
      defect_ = std::max(defect_, std::abs(acc - (i == j ? 1.0 : 0.0)));
    }
  }
  if (!(defect_ < 1e-8))
    throw NumericalError("BasisQuadrature: orthonormality defect " + std::to_string(defect_) +
                         " exceeds 1e-8; refine the panels or widen the domain");
}

std::vector<cplx> BasisQuadrature::synthesize(std::span<const cplx> coefficients) const {
  std::vector<cplx> psi(rule_.size());
  simd::active().real_matvec_t(table_, basis_.n_max(), rule_.size(), rule_.size(), coefficients, psi);
  return psi;
}

std::vector<cplx> BasisQuadrature::project(std::span<const cplx> values_on_nodes) const {
  std::vector<cplx> weighted(rule_.size());
  simd::active().scale_real(rule_.weights(), values_on_nodes, weighted);
  std::vector<cplx> c(basis_.n_max());
  simd::active().real_matvec(table_, basis_.n_max(), rule_.size(), rule_.size(), weighted, c);
  return c;
}

BasisQuadrature::Sampled BasisQuadrature::sample(std::span<const cplx> coefficients) const {
  return {coefficients, synthesize(coefficients)};
}

std::vector<BasisQuadrature::Segment> BasisQuadrature::segments(
    double lo, double hi, std::span<const double> breakpoints) const {
  std::vector<Segment> out;
  lo = std::max(lo, rule_.lo());
  hi = std::min(hi, rule_.hi());
  if (!(hi > lo)) return out;

  const auto bounds = rule_.boundaries();
  const double eps = 1e-13 * (rule_.hi() - rule_.lo());
  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  const std::size_t npp = rule_.nodes_per_panel();
  const auto first = static_cast<std::size_t>(
      std::upper_bound(bounds.begin(), bounds.end(), lo + eps) - bounds.begin());
  for (std::size_t p = first == 0 ? 0 : first - 1; p + 1 < bounds.size(); ++p) {
    const double b0 = bounds[p];
    const double b1 = bounds[p + 1];
    if (b0 >= hi - eps) break;
    if (b1 <= lo + eps) continue;
    std::vector<double> inner;
    for (double c : cuts)
      if (c > b0 + eps && c < b1 - eps) inner.push_back(c);
    if (inner.empty()) {
      if (!out.empty() && out.back().x.empty() && out.back().last_node == p * npp) {
        out.back().last_node += npp;
      } else {
        Segment s;
        s.first_node = p * npp;
        s.last_node = (p + 1) * npp;
        out.push_back(std::move(s));
      }
      continue;
    }
    Segment s;
    double left = b0;
    inner.push_back(b1);
    for (double right : inner) {
      if (left >= lo - eps && right <= hi + eps)
        append_mapped(rule_.reference(), left, right, s.x, s.w);
      left = right;
    }
    if (!s.x.empty()) out.push_back(std::move(s));
  }
  return out;
}

double BasisQuadrature::integrate_abs2(const Sampled& psi, double lo, double hi,
                                       std::span<const double> breakpoints,
                                       const std::function<double(double)>& f) const {
  const auto& kernels = simd::active();
  const auto nodes = rule_.nodes();
  const auto w = rule_.weights();
  std::vector<double> g;
  double total = 0.0;
  for (const Segment& s : segments(lo, hi, breakpoints)) {
    if (s.x.empty()) {
      const std::size_t len = s.last_node - s.first_node;
      g.resize(len);
      for (std::size_t k = 0; k < len; ++k) g[k] = w[s.first_node + k] * f(nodes[s.first_node + k]);
      total += kernels.weighted_abs2(g, std::span<const cplx>(psi.values).subspan(s.first_node, len));
    } else {
      const auto table = eigenfunction_table(basis_, s.x);
      std::vector<cplx> values(s.x.size());
      kernels.real_matvec_t(table, basis_.n_max(), s.x.size(), s.x.size(), psi.coefficients, values);
      g.resize(s.x.size());
      for (std::size_t k = 0; k < s.x.size(); ++k) g[k] = s.w[k] * f(s.x[k]);
      total += kernels.weighted_abs2(g, values);
    }
  }
  return total;
}

std::vector<cplx> BasisQuadrature::project_weighted(const Sampled& psi, double lo, double hi,
                                                    std::span<const double> breakpoints,
                                                    const std::function<double(double)>& f) const {
  const auto& kernels = simd::active();
  const std::size_t n = basis_.n_max();
  const std::size_t count = rule_.size();
  const auto nodes = rule_.nodes();
  const auto w = rule_.weights();
  std::vector<cplx> result(n, 0.0);
  std::vector<cplx> partial(n);
  std::vector<cplx> h;
  for (const Segment& s : segments(lo, hi, breakpoints)) {
    if (s.x.empty()) {
      const std::size_t len = s.last_node - s.first_node;
      h.resize(len);
      for (std::size_t k = 0; k < len; ++k) {
        const std::size_t idx = s.first_node + k;
        h[k] = w[idx] * f(nodes[idx]) * psi.values[idx];
      }
      kernels.real_matvec(std::span<const double>(table_).subspan(s.first_node), n, len, count, h,
                          partial);
    } else {
      const auto table = eigenfunction_table(basis_, s.x);
      std::vector<cplx> values(s.x.size());
      kernels.real_matvec_t(table, n, s.x.size(), s.x.size(), psi.coefficients, values);
      h.resize(s.x.size());
      for (std::size_t k = 0; k < s.x.size(); ++k) h[k] = s.w[k] * f(s.x[k]) * values[k];
      kernels.real_matvec(table, n, s.x.size(), s.x.size(), h, partial);
    }
    for (std::size_t i = 0; i < n; ++i) result[i] += partial[i];
  }
  return result;
}

std::vector<double> BasisQuadrature::overlap_matrix(double lo, double hi,
                                                    std::span<const double> breakpoints,
                                                    const std::function<double(double)>& f) const {
  const std::size_t n = basis_.n_max();
  const std::size_t count = rule_.size();
  const auto nodes = rule_.nodes();
  const auto w = rule_.weights();
  std::vector<double> m(n * n, 0.0);
  auto accumulate = [&](const double* table, std::size_t stride, std::size_t len,
                        const std::vector<double>& g) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* ui = table + i * stride;
      for (std::size_t j = i; j < n; ++j) {
        const double* uj = table + j * stride;
        double acc = 0.0;
        for (std::size_t k = 0; k < len; ++k) acc += g[k] * ui[k] * uj[k];
        m[i * n + j] += acc;
      }
    }
  };
  std::vector<double> g;
  for (const Segment& s : segments(lo, hi, breakpoints)) {
    if (s.x.empty()) {
      const std::size_t len = s.last_node - s.first_node;
      g.resize(len);
      for (std::size_t k = 0; k < len; ++k) g[k] = w[s.first_node + k] * f(nodes[s.first_node + k]);
      accumulate(table_.data() + s.first_node, count, len, g);
    } else {
      const auto table = eigenfunction_table(basis_, s.x);
      g.resize(s.x.size());
      for (std::size_t k = 0; k < s.x.size(); ++k) g[k] = s.w[k] * f(s.x[k]);
      accumulate(table.data(), s.x.size(), s.x.size(), g);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m[i * n + j] = m[j * n + i];
  return m;
}

GaussianProjection project_gaussian(const BasisQuadrature& quad, double sigma, double x0) {
  if (!(sigma > 0.0)) throw std::invalid_argument("project_gaussian: sigma must be positive");
  const OscillatorBasis& basis = quad.basis();
  // unit-norm packet: (pi sigma^2)^(-1/4) exp(-(x-x0)^2 / (2 sigma^2))
  const double amp = std::pow(std::numbers::pi * sigma * sigma, -0.25);
  auto packet = [&](double x) {
    const double d = (x - x0) / sigma;
    return amp * std::exp(-0.5 * d * d);
  };
  std::vector<double> breaks;
  for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    breaks.push_back(x0 - s * sigma);
    breaks.push_back(x0 + s * sigma);
  }

  const double lo = std::max(x0 - 40.0 * sigma, quad.rule().lo());
  const double hi = std::min(x0 + 40.0 * sigma, quad.rule().hi());
  if (!(hi > lo)) throw NumericalError("project_gaussian: packet lies outside the quadrature domain");

  // The packet is not a basis state, so it gets its own rule, refined to the
  // basis panel width and to sigma.
  PanelRule fine(lo, hi,
                 std::min(quad.rule().boundaries()[1] - quad.rule().boundaries()[0], sigma),
                 quad.rule().nodes_per_panel(), breaks);
  double packet_norm2 = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const double v = packet(fine.nodes()[k]);
    packet_norm2 += fine.weights()[k] * v * v;
  }
  if (std::abs(packet_norm2 - 1.0) > 1e-10)
    throw NumericalError("project_gaussian: quadrature misses the packet norm by " +
                         std::to_string(std::abs(packet_norm2 - 1.0)));

  const auto table = eigenfunction_table(basis, fine.nodes());
  std::vector<cplx> h(fine.size());
  for (std::size_t k = 0; k < fine.size(); ++k) h[k] = fine.weights()[k] * packet(fine.nodes()[k]);
  std::vector<cplx> c(basis.n_max());
  simd::active().real_matvec(table, basis.n_max(), fine.size(), fine.size(), h, c);

  EigenState state(basis, std::move(c));
  const double captured = state.norm() * state.norm();
  return {state.normalized(), captured};
}

GaussianProjection project_gaussian(const OscillatorBasis& basis, double sigma, double x0) {
  const BasisQuadrature quad(basis, std::max(sigma, std::abs(x0) / 8.0 + sigma));
  return project_gaussian(quad, sigma, x0);
}

} // namespace qmeasure
