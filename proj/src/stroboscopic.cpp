#include "qmeasure/stroboscopic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qmeasure/error.hpp"
#include "qmeasure/parallel.hpp"

namespace qmeasure {

double ImposedResults::operator()(std::size_t k) const {
  switch (policy) {
  case Policy::constant:
    return a0;
  case Policy::alternating:
    return k % 2 == 0 ? a0 : -a0;
  case Policy::listed:
    if (k >= listed.size())
      throw std::out_of_range("imposed result a_" + std::to_string(k) + " not listed");
    return listed[k];
  }
  return a0;
}

void StroboscopicPlan::validate() const {
  if (!(quiescent_time > 0.0) || !std::isfinite(quiescent_time))
    throw std::invalid_argument("plan: quiescent time must be positive");
  if (count < 1) throw std::invalid_argument("plan: count must be at least 1");
  if (!(delta_a > 0.0)) throw std::invalid_argument("plan: delta_a must be positive");
  if (!(a_max >= 0.0)) throw std::invalid_argument("plan: a_max must be non-negative");
  if (results.policy == ImposedResults::Policy::listed && results.listed.size() + 1 < count)
    throw std::invalid_argument("plan: " + std::to_string(count - 1) + " imposed results needed, " +
                                std::to_string(results.listed.size()) + " listed");
}

namespace {

void apply_phases(std::vector<cplx>& c, const std::vector<cplx>& phases) {
  for (std::size_t l = 0; l < c.size(); ++l) c[l] *= phases[l];
}

double norm2_of(const std::vector<cplx>& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

} // namespace

EigenState b_apply(const BasisQuadrature& quad, const StroboscopicPlan& plan, const EigenState& state,
                   double final_a) {
  plan.validate();
  if (!(state.basis == quad.basis())) throw std::invalid_argument("b_apply: basis mismatch");
  const auto phases = free_phase_factors(quad.basis(), plan.quiescent_time);
  std::vector<cplx> c = state.coefficients;
  for (std::size_t k = 0; k < plan.count; ++k) {
    const double a = k + 1 == plan.count ? final_a : plan.results(k);
    c = apply_weight(quad, quad.sample(c), WeightSpec(plan.kind, a, plan.delta_a));
    if (!(std::sqrt(norm2_of(c)) >= 1e-200))
      throw NumericalError("b_apply: chain norm underflow after filter " + std::to_string(k + 1));
    if (k + 1 < plan.count) apply_phases(c, phases);
  }
  return {state.basis, std::move(c)};
}

double qnd_commutator(const OscillatorBasis& basis, double dt) {
  const double turns = basis.omega() * dt / std::numbers::pi;
  const double nearest = std::round(turns);
  if (std::abs(turns - nearest) <= 1e-12 * std::max(1.0, std::abs(turns))) return 0.0;
  return basis.hbar() / (basis.mass() * basis.omega()) * std::sin(basis.omega() * dt);
}

StroboscopicEngine::StroboscopicEngine(const OscillatorBasis& basis, double sigma, double x0,
                                       EngineOptions options, QuadratureOptions quadrature)
    : quad_(std::make_shared<const BasisQuadrature>(basis, std::max(sigma, std::abs(x0) + sigma), quadrature)),
      initial_(EigenState::level(basis, 0)),
      options_(options) {
  auto g = project_gaussian(*quad_, sigma, x0);
  if (g.captured_fraction < 0.999)
    throw NumericalError("basis of " + std::to_string(basis.n_max()) + " levels captures only " +
                         std::to_string(g.captured_fraction) + " of the initial packet (need 0.999)");
  initial_ = std::move(g.state);
  captured_ = g.captured_fraction;
}

StroboscopicEngine::StroboscopicEngine(std::shared_ptr<const BasisQuadrature> quad, EigenState initial,
                                       EngineOptions options)
    : quad_(std::move(quad)), initial_(std::move(initial)), options_(options) {
  if (!quad_) throw std::invalid_argument("StroboscopicEngine: null quadrature");
  if (!(initial_.basis == quad_->basis())) throw std::invalid_argument("StroboscopicEngine: basis mismatch");
  captured_ = initial_.norm() * initial_.norm();
  initial_ = initial_.normalized();
}

EigenState StroboscopicEngine::b_apply(const StroboscopicPlan& plan, double final_a) const {
  return qmeasure::b_apply(*quad_, plan, initial_, final_a);
}

OutcomeDistribution StroboscopicEngine::scan(const EigenState& prior, const StroboscopicPlan& plan) const {
  const auto psi = quad_->sample(prior.coefficients);
  const auto points = options_.outcome_points;
  if (plan.a_max > 0.0)
    return scan_outcomes(*quad_, psi, plan.delta_a, plan.kind, uniform_grid(-plan.a_max, plan.a_max, points),
                         options_.convention, options_.boundary_tolerance);
  const Moments m = position_moments(*quad_, psi);
  const double first_span = 10.0 * std::sqrt(plan.delta_a * plan.delta_a + m.width * m.width);
  const double limit = std::abs(m.mean) + quad_->half_width() + 4.0 * plan.delta_a;
  double span = 0.0;
  try {
    const auto first = scan_outcomes(*quad_, psi, plan.delta_a, plan.kind,
                                     uniform_grid(m.mean - first_span, m.mean + first_span, points),
                                     options_.convention, options_.boundary_tolerance);
    span = 10.0 * first.delta_a_eff;
  } catch (const BoundaryMassError&) {
    span = std::min(1.5 * first_span, limit);
  }
  // Truncation ripples (Gibbs tails of the step filter in particular) can
  // leave mass out to the turning point, so the grid widens until the
  // boundary check passes or it covers the whole quadrature domain.
  for (;;) {
    try {
      return scan_outcomes(*quad_, psi, plan.delta_a, plan.kind, uniform_grid(m.mean - span, m.mean + span, points),
                           options_.convention, options_.boundary_tolerance);
    } catch (const BoundaryMassError&) {
      if (span >= limit) throw;
      span = std::min(1.5 * span, limit);
    }
  }
}

namespace {

// Walks the chain measurement by measurement, keeping the conditioned state
// normalized and its accumulated squared norm separately.
class Chain {
public:
  Chain(const BasisQuadrature& quad, const StroboscopicPlan& plan, const EigenState& initial)
      : quad_(quad), plan_(plan), phases_(free_phase_factors(quad.basis(), plan.quiescent_time)),
        state_(initial.normalized()) {}

  std::size_t next_measurement() const { return next_; }
  const EigenState& state() const { return state_; }
  double norm2() const { return std::exp(log_norm2_); }

  // Imposes a_{n-1} on measurement n and evolves to measurement n + 1.
  void advance() {
    const WeightSpec filter(plan_.kind, plan_.results(next_ - 1), plan_.delta_a);
    auto c = apply_weight(quad_, quad_.sample(state_.coefficients), filter);
    const double n2 = norm2_of(c);
    if (!(n2 > 0.0) || log_norm2_ + std::log(n2) < 2.0 * std::log(1e-200))
      throw NumericalError("measurement chain norm underflow at measurement " + std::to_string(next_));
    log_norm2_ += std::log(n2);
    const double s = 1.0 / std::sqrt(n2);
    for (auto& v : c) v *= s;
    apply_phases(c, phases_);
    state_ = EigenState(state_.basis, std::move(c));
    ++next_;
  }

private:
  const BasisQuadrature& quad_;
  const StroboscopicPlan& plan_;
  std::vector<cplx> phases_;
  EigenState state_;
  double log_norm2_ = 0.0;
  std::size_t next_ = 1;
};

} // namespace

OutcomeDistribution StroboscopicEngine::nth_outcome_distribution(const StroboscopicPlan& plan) const {
  plan.validate();
  Chain chain(*quad_, plan, initial_);
  while (chain.next_measurement() < plan.count) chain.advance();
  return scan(chain.state(), plan);
}

std::vector<SequencePoint> StroboscopicEngine::uncertainty_sequence(const StroboscopicPlan& plan) const {
  plan.validate();
  Chain chain(*quad_, plan, initial_);
  std::vector<SequencePoint> out;
  out.reserve(plan.count);
  for (std::size_t n = 1; n <= plan.count; ++n) {
    if (n > 1) chain.advance();
    const auto d = scan(chain.state(), plan);
    out.push_back({n, d.delta_a_eff, d.a_tilde, chain.norm2()});
  }
  return out;
}

AsymptoticResult StroboscopicEngine::asymptotic_uncertainty(StroboscopicPlan plan, std::size_t n_asym) const {
  if (n_asym < 8) throw std::invalid_argument("asymptotic_uncertainty: n_asym must be at least 8");
  plan.count = n_asym;
  plan.validate();
  Chain chain(*quad_, plan, initial_);
  while (chain.next_measurement() < n_asym - 2) chain.advance();
  const auto earlier = scan(chain.state(), plan);
  while (chain.next_measurement() < n_asym) chain.advance();
  const auto last = scan(chain.state(), plan);
  AsymptoticResult r;
  r.n = n_asym;
  r.delta_a_eff = last.delta_a_eff;
  r.a_tilde = last.a_tilde;
  r.earlier = earlier.delta_a_eff;
  r.stabilized = std::abs(last.delta_a_eff - earlier.delta_a_eff) / last.delta_a_eff < 0.01;
  r.norm = chain.norm2();
  return r;
}

UncertaintyCurve StroboscopicEngine::sweep_quiescent_time(std::span<const double> dt_over_T,
                                                          const StroboscopicPlan& base,
                                                          std::size_t n_asym) const {
  UncertaintyCurve curve;
  curve.kind = base.kind;
  curve.delta_a = base.delta_a;
  curve.points.resize(dt_over_T.size());
  const double period = quad_->basis().period();
  parallel_for(dt_over_T.size(), options_.threads, [&](std::size_t i) {
    auto& p = curve.points[i];
    p.dt_over_T = dt_over_T[i];
    try {
      if (!(dt_over_T[i] > 0.0)) throw std::invalid_argument("dT/T must be positive");
      StroboscopicPlan plan = base;
      plan.quiescent_time = dt_over_T[i] * period;
      p.asymptote = asymptotic_uncertainty(plan, n_asym);
      p.ratio = p.asymptote.delta_a_eff / base.delta_a;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  });
  return curve;
}

std::vector<double> StroboscopicEngine::default_sweep_grid(std::size_t points, double max) {
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = max * static_cast<double>(k + 1) / static_cast<double>(points);
  return g;
}

} // namespace qmeasure
