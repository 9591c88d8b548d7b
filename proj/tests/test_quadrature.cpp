#include "doctest.h"

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "qmeasure/quadrature.hpp"

using namespace qmeasure;

TEST_CASE("gauss_legendre matches the Boost tabulated rule") {
  for (std::size_t n : {7u, 15u, 20u}) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.nodes.size() == n);
    // Boost integrates a polynomial of degree 2n-1 exactly with the same rule.
    auto poly = [n](double x) { return std::pow(x, 2 * n - 2) + 0.3 * std::pow(x, 2 * n - 1) - x * x; };
    double ours = 0.0;
    for (std::size_t k = 0; k < n; ++k) ours += rule.weights[k] * poly(rule.nodes[k]);
    const double exact = 2.0 / static_cast<double>(2 * n - 1) - 2.0 / 3.0;
    CHECK(ours == doctest::Approx(exact).epsilon(1e-13));
  }
  const auto r20 = gauss_legendre(20);
  const double boost20 = boost::math::quadrature::gauss<double, 20>::integrate([](double x) { return std::cos(3 * x); }, -1.0, 1.0);
  double ours = 0.0;
  for (std::size_t k = 0; k < 20; ++k) ours += r20.weights[k] * std::cos(3 * r20.nodes[k]);
  CHECK(ours == doctest::Approx(boost20).epsilon(1e-14));
}

TEST_CASE("nodes are ascending and symmetric, weights sum to 2") {
  const auto rule = gauss_legendre(12);
  double sum = 0.0;
  for (std::size_t k = 0; k < 12; ++k) {
    sum += rule.weights[k];
    CHECK(rule.nodes[k] == doctest::Approx(-rule.nodes[11 - k]).epsilon(1e-15));
    if (k > 0) CHECK(rule.nodes[k] > rule.nodes[k - 1]);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("panel rule integrates a Gaussian and honours breakpoints") {
  const std::vector<double> cuts{0.37, -1.21};
  PanelRule rule(-10.0, 10.0, 2.0, 16, cuts);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) acc += rule.weights()[k] * std::exp(-rule.nodes()[k] * rule.nodes()[k]);
  CHECK(acc == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  const auto b = rule.boundaries();
  for (double c : cuts) {
    bool found = false;
    for (double x : b) found = found || std::abs(x - c) < 1e-15;
    CHECK(found);
  }
  // a step cut exactly at a breakpoint is integrated exactly
  double step = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) step += rule.weights()[k] * (rule.nodes()[k] > 0.37 ? 1.0 : 0.0);
  CHECK(step == doctest::Approx(10.0 - 0.37).epsilon(1e-13));
  CHECK(rule.panel_nodes(0).size() == 16);
}
