#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qmeasure/error.hpp"
#include "qmeasure/gaussian_analytic.hpp"
#include "qmeasure/stroboscopic.hpp"

using namespace qmeasure;

namespace {
const OscillatorBasis kBasis(0.5, 1.0, 1.0, 160);
const double kT = 2.0 * std::numbers::pi;

const StroboscopicEngine& engine() {
  static const StroboscopicEngine e(kBasis, 5.0, 0.0);
  return e;
}

StroboscopicPlan plan(double dt_over_T, std::size_t count, FilterKind kind = FilterKind::gaussian, double a0 = 0.0) {
  StroboscopicPlan p;
  p.quiescent_time = dt_over_T * kT;
  p.count = count;
  p.kind = kind;
  p.results.a0 = a0;
  return p;
}

Eigen::VectorXcd to_eigen(const std::vector<cplx>& c) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

Eigen::MatrixXcd to_eigen(const WMatrix& w) {
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = w(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

// exp(-i (n + 1/2) omega dt), built independently of the library
Eigen::MatrixXcd free_matrix(double dt) {
  const auto n = static_cast<Eigen::Index>(kBasis.n_max());
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index l = 0; l < n; ++l) d(l, l) = std::exp(cplx(0.0, -(static_cast<double>(l) + 0.5) * dt));
  return d;
}
} // namespace

TEST_CASE("imposed results policies") {
  ImposedResults r;
  r.a0 = 2.0;
  CHECK(r(5) == 2.0);
  r.policy = ImposedResults::Policy::alternating;
  CHECK(r(0) == 2.0);
  CHECK(r(1) == -2.0);
  CHECK(r(4) == 2.0);
  r.policy = ImposedResults::Policy::listed;
  r.listed = {1.0, 0.5};
  CHECK(r(1) == 0.5);
  CHECK_THROWS_AS(r(2), std::out_of_range);
}

TEST_CASE("plan validation") {
  auto p = plan(0.5, 0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = plan(-0.1, 4);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = plan(0.5, 4);
  p.delta_a = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("b_apply with one filter is a single impulsive measurement") {
  const auto& q = engine().quadrature();
  const auto p = plan(0.37, 1);
  const auto chained = b_apply(q, p, engine().initial_state(), 1.4);
  const auto direct = apply_impulsive(q, engine().initial_state(), WeightSpec(FilterKind::gaussian, 1.4, 1.0));
  for (std::size_t l = 0; l < chained.coefficients.size(); ++l)
    CHECK(std::abs(chained.coefficients[l] - direct.coefficients[l]) < 1e-14);
}

TEST_CASE("b_apply with vanishing filters is pure free evolution") {
  auto p = plan(0.31, 5);
  p.delta_a = 1e6;
  const auto out = b_apply(engine().quadrature(), p, engine().initial_state(), 0.0);
  const auto ref = evolve_free(engine().initial_state(), 4 * p.quiescent_time);
  double worst = 0.0;
  for (std::size_t l = 0; l < out.coefficients.size(); ++l)
    worst = std::max(worst, std::abs(out.coefficients[l] - ref.coefficients[l]));
  CHECK(worst < 1e-6);
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("b_apply equals the explicit matrix product") {
  const auto& q = engine().quadrature();
  const auto c = to_eigen(engine().initial_state().coefficients);
  SUBCASE("full periods: D = -1, three filters") {
    auto p = plan(1.0, 3, FilterKind::gaussian, 0.8);
    const auto w = to_eigen(w_matrix(q, WeightSpec(FilterKind::gaussian, 0.8, 1.0)));
    const auto wf = to_eigen(w_matrix(q, WeightSpec(FilterKind::gaussian, -0.5, 1.0)));
    const Eigen::VectorXcd ref = wf * w * w * c;
    const auto out = to_eigen(b_apply(q, p, engine().initial_state(), -0.5).coefficients);
    CHECK((out - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("generic quiescent time, alternating step filters") {
    auto p = plan(0.3, 4, FilterKind::step, 1.5);
    p.results.policy = ImposedResults::Policy::alternating;
    const auto d = free_matrix(p.quiescent_time);
    const auto wp = to_eigen(w_matrix(q, WeightSpec(FilterKind::step, 1.5, 1.0)));
    const auto wm = to_eigen(w_matrix(q, WeightSpec(FilterKind::step, -1.5, 1.0)));
    const auto wf = to_eigen(w_matrix(q, WeightSpec(FilterKind::step, 0.2, 1.0)));
    // grouping the product differently must not matter
    const Eigen::MatrixXcd left = (wf * d) * (wp * d);
    const Eigen::MatrixXcd right = (wm * d) * wp;
    const Eigen::VectorXcd ref = left * (right * c);
    const auto out = to_eigen(b_apply(q, p, engine().initial_state(), 0.2).coefficients);
    CHECK((out - ref).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("chain norm underflow is reported") {
  auto p = plan(0.5, 40, FilterKind::step, 0.0);
  p.results.policy = ImposedResults::Policy::alternating;
  p.results.a0 = 30.0;
  p.delta_a = 0.05;
  CHECK_THROWS_AS(b_apply(engine().quadrature(), p, engine().initial_state(), 0.0), NumericalError);
}

TEST_CASE("QND commutator") {
  CHECK(qnd_commutator(kBasis, kT / 2.0) == 0.0);
  CHECK(qnd_commutator(kBasis, kT) == 0.0);
  CHECK(qnd_commutator(kBasis, 3.0 * kT / 2.0) == 0.0);
  CHECK(qnd_commutator(kBasis, kT / 4.0) == doctest::Approx(2.0));
  CHECK(qnd_commutator(kBasis, 0.1) == doctest::Approx(2.0 * std::sin(0.1)));
}

TEST_CASE("uncertainty sequence starts at sqrt(26) and tracks the analytic engine") {
  for (double r : {0.25, 0.3, 0.5}) {
    const auto p = plan(r, 16);
    const auto seq = engine().uncertainty_sequence(p);
    REQUIRE(seq.size() == 16);
    CHECK(seq[0].n == 1);
    CHECK(seq[0].delta_a_eff == doctest::Approx(std::sqrt(26.0)).epsilon(1e-4));
    const auto a = stroboscopic_widths(5.0, 0.0, p, 1e-5 * kT, Units{});
    for (std::size_t n : {1u, 2u, 4u, 16u}) CHECK(seq[n - 1].delta_a_eff == doctest::Approx(a.delta_a_eff[n - 1]).epsilon(1e-3));
  }
}

TEST_CASE("asymptotic uncertainty at the QND points") {
  const auto half = engine().asymptotic_uncertainty(plan(0.5, 16));
  CHECK(half.stabilized);
  CHECK(half.delta_a_eff < 1.1);
  const auto quarter = engine().asymptotic_uncertainty(plan(0.25, 16));
  CHECK(quarter.delta_a_eff > 2.0 * half.delta_a_eff);
  CHECK_THROWS(engine().asymptotic_uncertainty(plan(0.5, 16), 6));
}

TEST_CASE("alternating results at T/2 match constant results at T") {
  auto alt = plan(0.5, 16, FilterKind::gaussian, 2.0);
  alt.results.policy = ImposedResults::Policy::alternating;
  const auto con = plan(1.0, 16, FilterKind::gaussian, 2.0);
  const auto x = engine().asymptotic_uncertainty(alt);
  const auto y = engine().asymptotic_uncertainty(con);
  CHECK(x.delta_a_eff == doctest::Approx(y.delta_a_eff).epsilon(0.02));
}

TEST_CASE("both probability conventions put the minima at the same points") {
  EngineOptions opts;
  opts.convention = ProbabilityConvention::norm_fourth;
  const StroboscopicEngine fourth(kBasis, 5.0, 0.0, opts);
  const std::vector<double> grid{0.375, 0.5, 0.625, 0.875, 1.0, 1.125};
  const auto a = engine().sweep_quiescent_time(grid, plan(0.5, 16));
  const auto b = fourth.sweep_quiescent_time(grid, plan(0.5, 16));
  for (const auto* curve : {&a, &b}) {
    REQUIRE(curve->points.size() == grid.size());
    for (const auto& pt : curve->points) REQUIRE_FALSE(pt.error.has_value());
    CHECK(curve->points[1].ratio < curve->points[0].ratio);
    CHECK(curve->points[1].ratio < curve->points[2].ratio);
    CHECK(curve->points[4].ratio < curve->points[3].ratio);
    CHECK(curve->points[4].ratio < curve->points[5].ratio);
  }
}

TEST_CASE("default sweep grid") {
  const auto g = StroboscopicEngine::default_sweep_grid();
  REQUIRE(g.size() == 60);
  CHECK(g.front() == doctest::Approx(0.025));
  CHECK(g.back() == doctest::Approx(1.5));
}

TEST_CASE("too small a basis is refused") {
  CHECK_THROWS_AS(StroboscopicEngine(OscillatorBasis(0.5, 1.0, 1.0, 20), 5.0, 0.0), NumericalError);
}
