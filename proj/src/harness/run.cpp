#include "qmeasure/harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <tuple>

#include "qmeasure/error.hpp"
#include "qmeasure/gaussian_analytic.hpp"
#include "qmeasure/parallel.hpp"
#include "qmeasure/pde.hpp"
#include "qmeasure/stroboscopic.hpp"

namespace qmeasure::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

OscillatorBasis basis_of(const ExperimentConfig& c) {
  return OscillatorBasis(c.units.mass, c.units.omega, c.units.hbar, c.numerics.n_max);
}

PdeOptions pde_options(const ExperimentConfig& c, std::size_t threads) {
  PdeOptions o;
  o.lattice = Lattice::centered(c.numerics.lattice.half_width, c.numerics.lattice.points,
                                c.numerics.lattice.dt_omega / c.units.omega);
  o.gate_steps = c.numerics.lattice.gate_steps;
  o.outcome_points = c.numerics.lattice.outcome_points;
  o.convention = c.numerics.convention;
  o.threads = threads;
  return o;
}

nlohmann::json numerics_of(const ExperimentConfig& c, Engine e) {
  switch (e) {
  case Engine::A:
    return {{"tau_over_T", c.numerics.tau_over_T}};
  case Engine::B:
    return {{"lattice_points", c.numerics.lattice.points},
            {"half_width", c.numerics.lattice.half_width},
            {"dt_omega", c.numerics.lattice.dt_omega},
            {"gate_steps", c.numerics.lattice.gate_steps},
            {"outcome_points", c.numerics.lattice.outcome_points},
            {"tau_over_T", c.numerics.tau_over_T}};
  case Engine::C:
    return {{"n_max", c.numerics.n_max},
            {"nodes_per_panel", c.numerics.nodes_per_panel},
            {"outcome_points", c.numerics.outcome_points}};
  }
  return {};
}

// Shared, read-only engine state built once per run.
struct Engines {
  std::shared_ptr<StroboscopicEngine> c;
  std::optional<GridWavefunction> b_initial;
};

Engines prepare(const ExperimentConfig& cfg, std::size_t inner_threads) {
  Engines e;
  for (Engine which : cfg.engines) {
    if (which == Engine::C) {
      EngineOptions o;
      o.outcome_points = cfg.numerics.outcome_points;
      o.convention = cfg.numerics.convention;
      o.threads = inner_threads;
      QuadratureOptions q;
      q.nodes_per_panel = cfg.numerics.nodes_per_panel;
      e.c = std::make_shared<StroboscopicEngine>(basis_of(cfg), cfg.sigma, cfg.x0, o, q);
    } else if (which == Engine::B) {
      e.b_initial = GridWavefunction::gaussian(pde_options(cfg, 1).lattice, cfg.sigma, cfg.x0);
    }
  }
  return e;
}

struct Task {
  Engine engine;
  FilterKind filter;
  double dt_over_T;
};

std::vector<Task> tasks_for(const ExperimentConfig& cfg, const std::vector<double>& grid) {
  std::vector<Task> t;
  for (Engine e : cfg.engines)
    for (FilterKind f : cfg.filters)
      for (double r : grid) t.push_back({e, f, r});
  return t;
}

ResultRecord base_record(const ExperimentConfig& cfg, const std::string& hash, const Task& t) {
  ResultRecord r;
  r.engine = t.engine;
  r.filter = t.filter;
  r.dt_over_T = t.dt_over_T;
  r.delta_a = cfg.delta_a;
  r.config_hash = hash;
  r.numerics = numerics_of(cfg, t.engine);
  return r;
}

// All measurements 1..N of one plan point.
std::vector<ResultRecord> sequence(const ExperimentConfig& cfg, const Engines& engines, const std::string& hash,
                                   const Task& t, std::size_t inner_threads) {
  const auto t0 = Clock::now();
  const auto plan = cfg.plan(t.dt_over_T, t.filter);
  std::vector<ResultRecord> out;
  auto push = [&](std::size_t n, double d, double a, double norm) {
    auto r = base_record(cfg, hash, t);
    r.n = n;
    r.delta_a_eff = d;
    r.a_tilde = a;
    r.norm = norm;
    out.push_back(std::move(r));
  };
  switch (t.engine) {
  case Engine::A: {
    const auto s = stroboscopic_widths(cfg.sigma, cfg.x0, plan, cfg.tau(), cfg.units);
    for (std::size_t i = 0; i < s.widths.size(); ++i)
      push(i + 1, s.delta_a_eff[i], s.centers[i], std::exp(2.0 * s.log_norms[i]));
    break;
  }
  case Engine::B: {
    const auto recs = run_stroboscopic_pde(*engines.b_initial, plan, cfg.tau(), cfg.units, pde_options(cfg, inner_threads));
    for (const auto& r : recs) push(r.n, r.delta_a_eff, r.a_tilde, r.norm);
    break;
  }
  case Engine::C: {
    for (const auto& p : engines.c->uncertainty_sequence(plan)) push(p.n, p.delta_a_eff, p.a_tilde, p.norm);
    break;
  }
  }
  const double wall = seconds_since(t0);
  for (auto& r : out) r.wall_time = wall;
  return out;
}

// Measurement N only, with the two-back stabilization flag.
ResultRecord asymptote(const ExperimentConfig& cfg, const Engines& engines, const std::string& hash, const Task& t,
                       std::size_t inner_threads) {
  const auto t0 = Clock::now();
  auto plan = cfg.plan(t.dt_over_T, t.filter);
  auto r = base_record(cfg, hash, t);
  r.n = plan.count;
  auto flag = [](double last, double earlier) { return std::abs(last - earlier) / last < 0.01; };
  switch (t.engine) {
  case Engine::A: {
    const auto s = stroboscopic_widths(cfg.sigma, cfg.x0, plan, cfg.tau(), cfg.units);
    r.delta_a_eff = s.delta_a_eff.back();
    r.a_tilde = s.centers.back();
    r.norm = std::exp(2.0 * s.log_norms.back());
    if (s.delta_a_eff.size() >= 3) r.stabilized = flag(r.delta_a_eff, s.delta_a_eff[s.delta_a_eff.size() - 3]);
    break;
  }
  case Engine::B: {
    const auto recs = run_stroboscopic_pde(*engines.b_initial, plan, cfg.tau(), cfg.units, pde_options(cfg, inner_threads));
    r.delta_a_eff = recs.back().delta_a_eff;
    r.a_tilde = recs.back().a_tilde;
    r.norm = recs.back().norm;
    if (recs.size() >= 3) r.stabilized = flag(r.delta_a_eff, recs[recs.size() - 3].delta_a_eff);
    break;
  }
  case Engine::C: {
    const auto a = engines.c->asymptotic_uncertainty(plan, plan.count);
    r.delta_a_eff = a.delta_a_eff;
    r.a_tilde = a.a_tilde;
    r.stabilized = a.stabilized;
    r.norm = a.norm;
    break;
  }
  }
  r.wall_time = seconds_since(t0);
  return r;
}

template <class Row>
void sort_rows(std::vector<Row>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tuple(x.engine, x.filter, x.dt_over_T, x.n) < std::tuple(y.engine, y.filter, y.dt_over_T, y.n);
  });
}

void sort_errors(std::vector<ErrorRecord>& errors) {
  std::stable_sort(errors.begin(), errors.end(), [](const ErrorRecord& x, const ErrorRecord& y) {
    return std::tuple(x.engine, x.filter, x.dt_over_T) < std::tuple(y.engine, y.filter, y.dt_over_T);
  });
}

template <class Fn>
RunResult execute(const ExperimentConfig& cfg, const std::vector<double>& grid, Fn&& point) {
  cfg.validate();
  RunResult result;
  result.config = to_json(cfg);
  result.config_hash = config_hash(cfg);
  const auto tasks = tasks_for(cfg, grid);
  const std::size_t outer = std::min(cfg.numerics.threads == 0 ? default_thread_count() : cfg.numerics.threads,
                                     std::max<std::size_t>(1, tasks.size()));
  const std::size_t inner = outer > 1 ? 1 : cfg.numerics.threads;
  const Engines engines = prepare(cfg, inner);
  std::vector<std::vector<ResultRecord>> slots(tasks.size());
  std::vector<std::optional<std::string>> failures(tasks.size());
  parallel_for(tasks.size(), outer, [&](std::size_t i) {
    try {
      slots[i] = point(engines, result.config_hash, tasks[i], inner);
    } catch (const std::invalid_argument& e) {
      failures[i] = std::string("invalid plan: ") + e.what();
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (auto& r : slots[i]) result.records.push_back(std::move(r));
    if (failures[i]) result.errors.push_back({tasks[i].engine, tasks[i].filter, tasks[i].dt_over_T, *failures[i]});
  }
  sort_rows(result.records);
  sort_errors(result.errors);
  return result;
}

} // namespace

RunResult run(const ExperimentConfig& cfg) {
  return execute(cfg, cfg.dt_over_T, [&](const Engines& e, const std::string& hash, const Task& t, std::size_t inner) {
    return sequence(cfg, e, hash, t, inner);
  });
}

RunResult sweep(const ExperimentConfig& cfg) {
  if (cfg.measurements < 8)
    throw ConfigError("plan.measurements: sweeps report the asymptotic value and need at least 8 measurements");
  return execute(cfg, cfg.sweep.grid(), [&](const Engines& e, const std::string& hash, const Task& t, std::size_t inner) {
    return std::vector<ResultRecord>{asymptote(cfg, e, hash, t, inner)};
  });
}

DistributionResult distribution(const ExperimentConfig& cfg) {
  cfg.validate();
  for (Engine e : cfg.engines)
    if (e == Engine::B)
      throw ConfigError("engines: distribution dumps are available for engines A and C only");
  DistributionResult result;
  result.config = to_json(cfg);
  result.config_hash = config_hash(cfg);
  const Engines engines = prepare(cfg, cfg.numerics.threads);
  for (const Task& t : tasks_for(cfg, cfg.dt_over_T)) {
    try {
      const auto plan = cfg.plan(t.dt_over_T, t.filter);
      OutcomeDistribution d;
      if (t.engine == Engine::C) {
        d = engines.c->nth_outcome_distribution(plan);
      } else {
        // Gaussian P(a) with variance delta_a_eff^2 / 2 about the packet centre
        const auto s = stroboscopic_widths(cfg.sigma, cfg.x0, plan, cfg.tau(), cfg.units);
        const double width = s.delta_a_eff.back();
        const double mu = s.centers.back();
        d.grid = uniform_grid(mu - 10.0 * width, mu + 10.0 * width, cfg.numerics.outcome_points);
        for (double a : d.grid)
          d.density.push_back(std::exp(-(a - mu) * (a - mu) / (width * width)) / (std::sqrt(std::numbers::pi) * width));
      }
      for (std::size_t i = 0; i < d.grid.size(); ++i)
        result.rows.push_back({t.engine, t.filter, t.dt_over_T, plan.count, d.grid[i], d.density[i]});
    } catch (const std::exception& e) {
      result.errors.push_back({t.engine, t.filter, t.dt_over_T, e.what()});
    }
  }
  sort_rows(result.rows);
  sort_errors(result.errors);
  return result;
}

} // namespace qmeasure::harness
