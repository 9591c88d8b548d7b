// qmeasure run|sweep|validate|distribution --config <path> [options]
//
// Exit codes: 0 success, 1 validation failure, 2 config error,
// 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qmeasure/error.hpp"
#include "qmeasure/harness/config.hpp"
#include "qmeasure/harness/cross_validate.hpp"
#include "qmeasure/harness/emit.hpp"
#include "qmeasure/harness/run.hpp"

namespace {

using namespace qmeasure;
using namespace qmeasure::harness;

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Overrides {
  std::string config;
  std::vector<std::string> engines;
  std::vector<std::string> filters;
  std::vector<std::string> formats;
  std::vector<double> dt_over_T;
  std::string out;
  std::size_t sweep_points = 0;
  double sweep_max = 0.0;
  long threads = -1;
};

void apply(const Overrides& o, ExperimentConfig& c) {
  if (!o.engines.empty()) {
    c.engines.clear();
    for (const auto& e : o.engines) c.engines.push_back(parse_engine(e));
  }
  if (!o.filters.empty()) {
    c.filters.clear();
    for (const auto& f : o.filters) {
      try {
        c.filters.push_back(parse_filter_kind(f));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--filter: ") + e.what());
      }
    }
  }
  if (!o.formats.empty()) {
    c.formats.clear();
    for (const auto& f : o.formats) c.formats.push_back(parse_format(f));
  }
  if (!o.dt_over_T.empty()) c.dt_over_T = o.dt_over_T;
  if (!o.out.empty()) c.output_directory = o.out;
  if (o.sweep_points > 0) c.sweep.points = o.sweep_points;
  if (o.sweep_max > 0.0) c.sweep.max = o.sweep_max;
  if (o.threads >= 0) c.numerics.threads = static_cast<std::size_t>(o.threads);
  c.validate();
}

void report_errors(const std::vector<ErrorRecord>& errors) {
  for (const auto& e : errors)
    std::cerr << "error: engine " << to_string(e.engine) << ", " << to_string(e.filter) << ", dT/T = " << e.dt_over_T
              << ": " << e.message << "\n";
}

template <class Result, class... Chart>
void write_outputs(const ExperimentConfig& c, const Result& r, const std::string& stem, Chart... chart) {
  for (auto f : c.formats) {
    const auto path = emit(r, f, chart..., c.output_directory, stem);
    std::cout << "wrote " << path.string() << "\n";
  }
}

int do_run(const ExperimentConfig& c) {
  const auto r = run(c);
  report_errors(r.errors);
  if (!r.records.empty()) {
    write_outputs(c, r, "run", Chart::sequence);
    for (const auto& rec : r.records)
      if (rec.n == 1 || rec.n == c.measurements)
        std::printf("%s %-8s dT/T=%-8g n=%-3zu delta_a_eff=%.6f a_tilde=%.6g\n", std::string(to_string(rec.engine)).c_str(),
                    std::string(to_string(rec.filter)).c_str(), rec.dt_over_T, rec.n, rec.delta_a_eff, rec.a_tilde);
  }
  return r.errors.empty() ? kOk : kNumericalFailure;
}

int do_sweep(const ExperimentConfig& c) {
  const auto r = sweep(c);
  report_errors(r.errors);
  if (!r.records.empty()) {
    write_outputs(c, r, "sweep", Chart::sweep);
    // local minima of each curve
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      const auto& rec = r.records[i];
      const bool same_prev = i > 0 && r.records[i - 1].engine == rec.engine && r.records[i - 1].filter == rec.filter;
      const bool same_next = i + 1 < r.records.size() && r.records[i + 1].engine == rec.engine &&
                             r.records[i + 1].filter == rec.filter;
      if (same_prev && same_next && rec.delta_a_eff < r.records[i - 1].delta_a_eff &&
          rec.delta_a_eff <= r.records[i + 1].delta_a_eff)
        std::printf("%s %-8s local minimum at dT/T=%g: ratio %.5f\n", std::string(to_string(rec.engine)).c_str(),
                    std::string(to_string(rec.filter)).c_str(), rec.dt_over_T, rec.delta_a_eff / rec.delta_a);
    }
  }
  return r.errors.empty() ? kOk : kNumericalFailure;
}

int do_validate(const ExperimentConfig& c) {
  const auto report = cross_validate(c);
  report_errors(report.run.errors);
  if (!report.run.records.empty()) write_outputs(c, report.run, "validate", Chart::sequence);
  std::size_t failed = 0;
  for (const auto& cmp : report.comparisons) {
    if (cmp.pass) continue;
    ++failed;
    std::printf("FAIL %s vs %s %s dT/T=%g n=%zu: %.6f vs %.6f (%.3f%% > %.0f%%)\n",
                std::string(to_string(cmp.first)).c_str(), std::string(to_string(cmp.second)).c_str(),
                std::string(to_string(cmp.filter)).c_str(), cmp.dt_over_T, cmp.n, cmp.value_first, cmp.value_second,
                100.0 * cmp.relative_difference, 100.0 * cmp.tolerance);
  }
  std::printf("%s: %zu comparisons, %zu failed\n", report.passed ? "PASS" : "FAIL", report.comparisons.size(), failed);
  if (!report.run.errors.empty()) return kNumericalFailure;
  return report.passed ? kOk : kValidationFailed;
}

int do_distribution(const ExperimentConfig& c) {
  const auto r = distribution(c);
  report_errors(r.errors);
  if (!r.rows.empty()) write_outputs(c, r, "distribution");
  return r.errors.empty() ? kOk : kNumericalFailure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impulsive and stroboscopic position measurements on a harmonic oscillator"};
  app.require_subcommand(1, 1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--engines", o.engines, "engines to run, e.g. A,C")->delimiter(',');
    sub->add_option("--filter", o.filters, "filter kind(s): gaussian, step")->delimiter(',');
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.formats, "output formats: csv, json, svg")->delimiter(',');
    sub->add_option("--dt-over-T", o.dt_over_T, "quiescent times in units of T")->delimiter(',');
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  };
  auto* run_cmd = app.add_subcommand("run", "measurement sequences n = 1..N");
  auto* sweep_cmd = app.add_subcommand("sweep", "asymptotic uncertainty over a quiescent-time grid");
  auto* validate_cmd = app.add_subcommand("validate", "cross-validate two or more engines");
  auto* dist_cmd = app.add_subcommand("distribution", "outcome distribution of the last measurement");
  for (auto* s : {run_cmd, sweep_cmd, validate_cmd, dist_cmd}) add_common(s);
  sweep_cmd->add_option("--points", o.sweep_points, "sweep grid points");
  sweep_cmd->add_option("--max", o.sweep_max, "sweep grid maximum dT/T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto config = load_config(o.config);
    apply(o, config);
    if (*run_cmd) return do_run(config);
    if (*sweep_cmd) return do_sweep(config);
    if (*validate_cmd) return do_validate(config);
    return do_distribution(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
