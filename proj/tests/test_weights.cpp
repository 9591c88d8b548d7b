#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "qmeasure/weights.hpp"

using namespace qmeasure;

namespace {
const OscillatorBasis kBasis(0.5, 1.0, 1.0, 40);
const BasisQuadrature& quad() {
  static const BasisQuadrature q(kBasis, 5.0);
  return q;
}
}

TEST_CASE("W_00 of a centred unit Gaussian filter is 1/sqrt(2)") {
  const auto w = w_matrix(quad(), WeightSpec(FilterKind::gaussian, 0.0, 1.0));
  CHECK(w(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // off-centre: exp(-a^2 / 4) / sqrt(2); a = sqrt(2) gives exp(-1/2) / sqrt(2)
  const auto shifted = w_matrix(quad(), WeightSpec(FilterKind::gaussian, std::sqrt(2.0), 1.0));
  CHECK(shifted(0, 0) == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("entries agree with an adaptive-quadrature oracle") {
  for (auto kind : {FilterKind::gaussian, FilterKind::step}) {
    const WeightSpec spec(kind, 0.7, 0.8);
    const auto w = w_matrix(quad(), spec);
    for (unsigned i : {0u, 3u, 11u})
      for (unsigned j : {0u, 4u, 11u}) {
        auto f = [&](double x) { return oracle::hermite_function(i, x) * evaluate_weight(spec, x) * oracle::hermite_function(j, x); };
        const double ref = kind == FilterKind::step ? oracle::integrate(f, 0.7 - 0.8, 0.7 + 0.8) : oracle::integrate(f, -30.0, 30.0);
        CHECK(w(i, j) == doctest::Approx(ref).epsilon(1e-9).scale(1e-10));
      }
  }
}

TEST_CASE("symmetry and spectral bound over 100 random draws") {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> centre(-6.0, 6.0), width(0.2, 4.0), coin(0.0, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    const auto kind = coin(rng) < 0.5 ? FilterKind::gaussian : FilterKind::step;
    const WeightSpec spec(kind, centre(rng), width(rng));
    const auto w = w_matrix(quad(), spec);
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = w(i, j);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    // 0 <= w(x) <= 1 pointwise bounds the truncated matrix spectrum
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-10);
  }
}

TEST_CASE("filter shapes, supports and coupling") {
  const WeightSpec g(FilterKind::gaussian, 1.0, 2.0);
  CHECK(evaluate_weight(g, 1.0) == doctest::Approx(1.0));
  CHECK(evaluate_weight(g, 3.0) == doctest::Approx(std::exp(-0.5)));
  const WeightSpec s(FilterKind::step, 1.0, 2.0);
  CHECK(evaluate_weight(s, 2.9) == 1.0);
  CHECK(evaluate_weight(s, 3.1) == 0.0);
  const auto [lo, hi] = weight_support(s);
  CHECK(lo == doctest::Approx(-1.0));
  CHECK(hi == doctest::Approx(3.0));
  CHECK(kappa_from(2.0, 0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(WeightSpec(FilterKind::step, 0.0, 0.0), std::invalid_argument);
  CHECK(parse_filter_kind("step") == FilterKind::step);
  CHECK_THROWS_AS(parse_filter_kind("box"), std::invalid_argument);
}

TEST_CASE("position-space filtering equals W c") {
  const auto g = project_gaussian(quad(), 1.7, 0.9);
  const WeightSpec spec(FilterKind::step, -0.2, 1.1);
  const auto w = w_matrix(quad(), spec);
  const auto direct = apply_weight(quad(), quad().sample(g.state.coefficients), spec);
  for (std::size_t i = 0; i < w.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w(i, j) * g.state.coefficients[j];
    CHECK(std::abs(acc - direct[i]) < 1e-10);
  }
}
