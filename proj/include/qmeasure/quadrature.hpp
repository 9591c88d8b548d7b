#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qmeasure {

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t n);

// Composite Gauss-Legendre rule on [lo, hi]: panels of at most
// `panel_width`, each carrying the same number of nodes. Extra breakpoints
// (e.g. the edges of a discontinuous filter) are inserted as panel
// boundaries so no panel straddles them.
class PanelRule {
public:
  PanelRule(double lo, double hi, double panel_width, std::size_t nodes_per_panel,
            std::span<const double> breakpoints = {});

  double lo() const { return boundaries_.front(); }
  double hi() const { return boundaries_.back(); }
  std::size_t nodes_per_panel() const { return reference_.nodes.size(); }
  std::size_t panel_count() const { return boundaries_.size() - 1; }
  std::size_t size() const { return nodes_.size(); }

  std::span<const double> boundaries() const { return boundaries_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  // Nodes/weights of one panel (contiguous slice of nodes()).
  std::span<const double> panel_nodes(std::size_t p) const;
  std::span<const double> panel_weights(std::size_t p) const;

  const GaussLegendre& reference() const { return reference_; }

private:
  GaussLegendre reference_;
  std::vector<double> boundaries_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Maps the reference rule onto [a, b], appending to the output vectors.
void append_mapped(const GaussLegendre& ref, double a, double b, std::vector<double>& nodes,
                   std::vector<double>& weights);

} // namespace qmeasure
