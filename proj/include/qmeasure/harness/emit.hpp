#pragma once

// Output writers: CSV (fixed header), JSON (records plus canonical config,
// no timings) and self-contained SVG line charts.

#include <filesystem>
#include <string>
#include <vector>

#include "qmeasure/harness/run.hpp"

namespace qmeasure::harness {

inline constexpr const char* kCsvHeader = "engine,filter,dt_over_T,n,delta_a_eff,a_tilde,norm";

// sequence: delta_a_eff against n, one line per (engine, filter, dt_over_T).
// sweep: delta_a_eff / delta_a against dt_over_T, one line per (engine, filter).
enum class Chart { sequence, sweep };

std::string to_csv(const std::vector<ResultRecord>& records);
nlohmann::json to_json(const RunResult& result);
std::string to_svg(const std::vector<ResultRecord>& records, Chart chart);

std::string to_csv(const std::vector<DistributionRow>& rows);
nlohmann::json to_json(const DistributionResult& result);
std::string to_svg(const std::vector<DistributionRow>& rows);

// Writes <dir>/<stem>.<format>; creates dir. Throws Error on an empty record
// list (nothing is written) or an unwritable path.
std::filesystem::path emit(const RunResult& result, OutputFormat format, Chart chart,
                           const std::filesystem::path& dir, const std::string& stem);
std::filesystem::path emit(const DistributionResult& result, OutputFormat format,
                           const std::filesystem::path& dir, const std::string& stem);

// Minimal SVG line chart, shared by both record kinds.
struct Polyline {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
std::string line_chart(const std::vector<Polyline>& lines, const std::string& title, const std::string& x_label,
                       const std::string& y_label);

} // namespace qmeasure::harness
