#include "qmeasure/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmeasure {

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node for the weight
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = pk;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

void append_mapped(const GaussLegendre& ref, double a, double b, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < ref.nodes.size(); ++k) {
    nodes.push_back(mid + half * ref.nodes[k]);
    weights.push_back(half * ref.weights[k]);
  }
}

PanelRule::PanelRule(double lo, double hi, double panel_width, std::size_t nodes_per_panel,
                     std::span<const double> breakpoints)
    : reference_(gauss_legendre(nodes_per_panel)) {
  if (!(hi > lo)) throw std::invalid_argument("PanelRule: empty interval");
  if (!(panel_width > 0.0)) throw std::invalid_argument("PanelRule: panel width must be positive");
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel_width));
  boundaries_.reserve(panels + 1 + breakpoints.size());
  for (std::size_t p = 0; p <= panels; ++p)
    boundaries_.push_back(lo + (hi - lo) * static_cast<double>(p) / static_cast<double>(panels));
  boundaries_.back() = hi;
  for (double b : breakpoints)
    if (b > lo && b < hi) boundaries_.push_back(b);
  std::sort(boundaries_.begin(), boundaries_.end());
  // drop degenerate slivers created by breakpoints landing on a boundary
  const double eps = 1e-13 * (hi - lo);
  std::vector<double> unique;
  unique.reserve(boundaries_.size());
  for (double b : boundaries_)
    if (unique.empty() || b - unique.back() > eps) unique.push_back(b);
  unique.back() = hi;
  boundaries_ = std::move(unique);

  nodes_.reserve(panel_count() * nodes_per_panel);
  weights_.reserve(panel_count() * nodes_per_panel);
  for (std::size_t p = 0; p + 1 < boundaries_.size(); ++p)
    append_mapped(reference_, boundaries_[p], boundaries_[p + 1], nodes_, weights_);
}

std::span<const double> PanelRule::panel_nodes(std::size_t p) const {
  return std::span<const double>(nodes_).subspan(p * nodes_per_panel(), nodes_per_panel());
}

std::span<const double> PanelRule::panel_weights(std::size_t p) const {
  return std::span<const double>(weights_).subspan(p * nodes_per_panel(), nodes_per_panel());
}

} // namespace qmeasure
