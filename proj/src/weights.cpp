#include "qmeasure/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qmeasure/error.hpp"

namespace qmeasure {

std::string_view to_string(FilterKind kind) {
  return kind == FilterKind::gaussian ? "gaussian" : "step";
}

FilterKind parse_filter_kind(std::string_view text) {
  if (text == "gaussian") return FilterKind::gaussian;
  if (text == "step") return FilterKind::step;
  throw std::invalid_argument("unknown filter kind '" + std::string(text) +
                              "' (expected gaussian or step)");
}

WeightSpec::WeightSpec(FilterKind k, double a, double da) : kind(k), center(a), delta_a(da) {
  if (!(da > 0.0) || !std::isfinite(a)) throw std::invalid_argument("WeightSpec: delta_a must be positive");
}

double evaluate_weight(const WeightSpec& spec, double x) {
  const double d = x - spec.center;
  if (spec.kind == FilterKind::gaussian) return std::exp(-0.5 * d * d / (spec.delta_a * spec.delta_a));
  return std::abs(d) <= spec.delta_a ? 1.0 : 0.0;
}

std::pair<double, double> weight_support(const WeightSpec& spec) {
  const double reach = spec.kind == FilterKind::gaussian ? 40.0 * spec.delta_a : spec.delta_a;
  return {spec.center - reach, spec.center + reach};
}

std::vector<double> weight_breakpoints(const WeightSpec& spec, double panel_width) {
  const double a = spec.center;
  const double da = spec.delta_a;
  if (spec.kind == FilterKind::step) return {a - da, a + da};
  if (da >= 2.0 * panel_width) return {};
  std::vector<double> out;
  for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    out.push_back(a - s * da);
    out.push_back(a + s * da);
  }
  return out;
}

double kappa_from(double delta_a, double tau) {
  if (!(delta_a > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("kappa_from: delta_a and tau must be positive");
  return 1.0 / (2.0 * delta_a * delta_a * tau);
}

WMatrix::WMatrix(OscillatorBasis basis, WeightSpec spec, std::vector<double> entries,
                 double error_estimate)
    : basis_(basis), spec_(spec), entries_(std::move(entries)), error_estimate_(error_estimate) {
  if (entries_.size() != basis_.n_max() * basis_.n_max())
    throw std::invalid_argument("WMatrix: entry count must be n_max^2");
}

namespace {

double panel_width_of(const BasisQuadrature& quad) {
  const auto b = quad.rule().boundaries();
  return b[1] - b[0];
}

// Same panels and breakpoints, fewer nodes per panel: the difference is the
// error estimate reported with every W-matrix.
std::vector<double> coarse_overlap(const BasisQuadrature& quad, const WeightSpec& spec,
                                   std::span<const double> breaks) {
  const auto [lo, hi] = weight_support(spec);
  const double a = std::max(lo, quad.rule().lo());
  const double b = std::min(hi, quad.rule().hi());
  const std::size_t n = quad.basis().n_max();
  std::vector<double> m(n * n, 0.0);
  if (!(b > a)) return m;
  const std::size_t npp = quad.rule().nodes_per_panel() > 8 ? quad.rule().nodes_per_panel() - 6
                                                            : quad.rule().nodes_per_panel() + 6;
  const PanelRule coarse(a, b, panel_width_of(quad), npp, breaks);
  const auto table = eigenfunction_table(quad.basis(), coarse.nodes());
  const std::size_t count = coarse.size();
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = coarse.weights()[k] * evaluate_weight(spec, coarse.nodes()[k]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < count; ++k) acc += g[k] * table[i * count + k] * table[j * count + k];
      m[i * n + j] = m[j * n + i] = acc;
    }
  return m;
}

} // namespace

WMatrix w_matrix(const BasisQuadrature& quad, const WeightSpec& spec) {
  const auto [lo, hi] = weight_support(spec);
  const auto breaks = weight_breakpoints(spec, panel_width_of(quad));
  auto entries = quad.overlap_matrix(lo, hi, breaks, [&](double x) { return evaluate_weight(spec, x); });
  const auto coarse = coarse_overlap(quad, spec, breaks);
  double err = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) err = std::max(err, std::abs(entries[k] - coarse[k]));
  if (!(err <= 1e-8))
    throw NumericalError("w_matrix: estimated quadrature error " + std::to_string(err) + " exceeds 1e-8");
  return {quad.basis(), spec, std::move(entries), err};
}

WMatrix w_matrix(const OscillatorBasis& basis, const WeightSpec& spec) {
  const BasisQuadrature quad(basis, basis.length_scale());
  return w_matrix(quad, spec);
}

std::vector<cplx> apply_weight(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi,
                               const WeightSpec& spec) {
  const auto [lo, hi] = weight_support(spec);
  const auto breaks = weight_breakpoints(spec, panel_width_of(quad));
  return quad.project_weighted(psi, lo, hi, breaks, [&](double x) { return evaluate_weight(spec, x); });
}

double filtered_norm2(const BasisQuadrature& quad, const BasisQuadrature::Sampled& psi,
                      const WeightSpec& spec) {
  const auto [lo, hi] = weight_support(spec);
  const auto breaks = weight_breakpoints(spec, panel_width_of(quad));
  return quad.integrate_abs2(psi, lo, hi, breaks, [&](double x) {
    const double w = evaluate_weight(spec, x);
    return w * w;
  });
}

} // namespace qmeasure
