#include "qmeasure/harness/cross_validate.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "qmeasure/error.hpp"

namespace qmeasure::harness {

ValidationReport compare(RunResult run, std::size_t measurements) {
  ValidationReport report;
  std::map<std::tuple<FilterKind, double, std::size_t>, std::vector<const ResultRecord*>> groups;
  for (const auto& r : run.records) groups[{r.filter, r.dt_over_T, r.n}].push_back(&r);
  const std::size_t asym_first = measurements > kAsymptoticSpan ? measurements - kAsymptoticSpan : 1;
  for (const auto& [key, recs] : groups) {
    const std::size_t n = std::get<2>(key);
    double tol = 0.0;
    if (n >= asym_first) tol = kAsymptoticTolerance;
    else if (n <= kTransientLast) tol = kTransientTolerance;
    else continue;
    for (std::size_t i = 0; i < recs.size(); ++i)
      for (std::size_t j = i + 1; j < recs.size(); ++j) {
        Comparison c;
        c.first = recs[i]->engine;
        c.second = recs[j]->engine;
        c.filter = std::get<0>(key);
        c.dt_over_T = std::get<1>(key);
        c.n = n;
        c.value_first = recs[i]->delta_a_eff;
        c.value_second = recs[j]->delta_a_eff;
        c.relative_difference = std::abs(c.value_first - c.value_second) / (0.5 * (c.value_first + c.value_second));
        c.tolerance = tol;
        c.pass = c.relative_difference <= tol;
        report.comparisons.push_back(c);
      }
  }
  report.passed = run.errors.empty() && !report.comparisons.empty();
  for (const auto& c : report.comparisons) report.passed = report.passed && c.pass;
  report.run = std::move(run);
  return report;
}

ValidationReport cross_validate(const ExperimentConfig& config) {
  if (config.engines.size() < 2) throw ConfigError("engines: cross-validation needs at least two engines");
  return compare(run(config), config.measurements);
}

} // namespace qmeasure::harness
