#include "qmeasure/harness/emit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "qmeasure/error.hpp"

namespace qmeasure::harness {

using nlohmann::json;

namespace {

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << (v == 0.0 ? 0.0 : v); // no "-0"
  return s.str();
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += ch;
    }
  }
  return out;
}

std::string name(Engine e) { return std::string(to_string(e)); }
std::string name(FilterKind k) { return std::string(to_string(k)); }

json errors_json(const std::vector<ErrorRecord>& errors) {
  json out = json::array();
  for (const auto& e : errors)
    out.push_back({{"engine", name(e.engine)}, {"filter", name(e.filter)}, {"dt_over_T", e.dt_over_T},
                   {"message", e.message}});
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::filesystem::path prepare_path(const std::filesystem::path& dir, const std::string& stem, OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir / (stem + "." + std::string(to_string(format)));
}

// 1, 2 or 5 times a power of ten, roughly span / 5
double tick_step(double span) {
  const double raw = span / 5.0;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (m * p >= raw) return m * p;
  return 10.0 * p;
}

} // namespace

std::string to_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& r : records)
    out << name(r.engine) << ',' << name(r.filter) << ',' << num(r.dt_over_T) << ',' << r.n << ','
        << num(r.delta_a_eff) << ',' << num(r.a_tilde) << ',' << num(r.norm) << "\n";
  return out.str();
}

json to_json(const RunResult& result) {
  json records = json::array();
  for (const auto& r : result.records) {
    json j = {{"engine", name(r.engine)},   {"filter", name(r.filter)},     {"dt_over_T", r.dt_over_T},
              {"n", r.n},                   {"delta_a", r.delta_a},         {"delta_a_eff", r.delta_a_eff},
              {"a_tilde", r.a_tilde},       {"norm", r.norm},               {"config_hash", r.config_hash},
              {"numerics", r.numerics}};
    if (r.stabilized) j["stabilized"] = *r.stabilized;
    records.push_back(std::move(j));
  }
  return {{"config_hash", result.config_hash},
          {"config", result.config},
          {"records", records},
          {"errors", errors_json(result.errors)}};
}

std::string to_svg(const std::vector<ResultRecord>& records, Chart chart) {
  std::map<std::tuple<Engine, FilterKind, double>, Polyline> lines;
  for (const auto& r : records) {
    const double key_dt = chart == Chart::sequence ? r.dt_over_T : 0.0;
    auto& line = lines[{r.engine, r.filter, key_dt}];
    if (line.label.empty()) {
      line.label = "engine " + name(r.engine) + ", " + name(r.filter);
      if (chart == Chart::sequence) line.label += ", dT/T = " + num(r.dt_over_T);
    }
    if (chart == Chart::sequence)
      line.points.emplace_back(static_cast<double>(r.n), r.delta_a_eff);
    else
      line.points.emplace_back(r.dt_over_T, r.delta_a_eff / r.delta_a);
  }
  std::vector<Polyline> ordered;
  for (auto& [key, line] : lines) ordered.push_back(std::move(line));
  if (chart == Chart::sequence)
    return line_chart(ordered, "Effective uncertainty along the measurement sequence", "measurement n",
                      "delta_a_eff");
  return line_chart(ordered, "Asymptotic effective uncertainty against quiescent time", "dT / T",
                    "delta_a_eff^as / delta_a");
}

std::string to_csv(const std::vector<DistributionRow>& rows) {
  std::ostringstream out;
  out << "engine,filter,dt_over_T,n,a,density\n";
  for (const auto& r : rows)
    out << name(r.engine) << ',' << name(r.filter) << ',' << num(r.dt_over_T) << ',' << r.n << ',' << num(r.a)
        << ',' << num(r.density) << "\n";
  return out.str();
}

json to_json(const DistributionResult& result) {
  std::map<std::tuple<Engine, FilterKind, double>, json> curves;
  for (const auto& r : result.rows) {
    auto& c = curves[{r.engine, r.filter, r.dt_over_T}];
    if (c.is_null())
      c = {{"engine", name(r.engine)}, {"filter", name(r.filter)}, {"dt_over_T", r.dt_over_T}, {"n", r.n},
           {"a", json::array()}, {"density", json::array()}};
    c["a"].push_back(r.a);
    c["density"].push_back(r.density);
  }
  json list = json::array();
  for (auto& [key, c] : curves) list.push_back(std::move(c));
  return {{"config_hash", result.config_hash},
          {"config", result.config},
          {"distributions", list},
          {"errors", errors_json(result.errors)}};
}

std::string to_svg(const std::vector<DistributionRow>& rows) {
  std::map<std::tuple<Engine, FilterKind, double>, Polyline> lines;
  for (const auto& r : rows) {
    auto& line = lines[{r.engine, r.filter, r.dt_over_T}];
    if (line.label.empty())
      line.label = "engine " + name(r.engine) + ", " + name(r.filter) + ", dT/T = " + num(r.dt_over_T);
    line.points.emplace_back(r.a, r.density);
  }
  std::vector<Polyline> ordered;
  for (auto& [key, line] : lines) ordered.push_back(std::move(line));
  return line_chart(ordered, "Outcome distribution of the last measurement", "a", "P(a)");
}

std::string line_chart(const std::vector<Polyline>& lines, const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  constexpr double W = 760.0, H = 480.0, left = 80.0, right = 230.0, top = 40.0, bottom = 60.0;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& l : lines)
    for (auto [x, y] : l.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  s << "<g stroke=\"#444\" fill=\"none\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
    << "\" height=\"" << ph << "\"/></g>\n";
  const double xs = tick_step(x1 - x0), ys = tick_step(y1 - y0);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    s << "<line x1=\"" << sx(t) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(t) << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"#444\"/><text x=\"" << sx(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << num(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << left << "\" y2=\"" << sy(t)
      << "\" stroke=\"#444\"/><text x=\"" << left - 8 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">"
      << num(std::abs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xml_escape(x_label)
    << "</text>\n";
  s << "<text transform=\"translate(20," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const char* colour = palette[i % std::size(palette)];
    s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (auto [x, y] : lines[i].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      s << (first ? "" : " ") << sx(x) << ',' << sy(y);
      first = false;
    }
    s << "\"><title>" << xml_escape(lines[i].label) << "</title></polyline>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
    s << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - right + 36 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/><text x=\"" << W - right + 42 << "\" y=\""
      << ly << "\">" << xml_escape(lines[i].label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::filesystem::path emit(const RunResult& result, OutputFormat format, Chart chart,
                           const std::filesystem::path& dir, const std::string& stem) {
  if (result.records.empty()) throw Error("emit: no records to write");
  const auto path = prepare_path(dir, stem, format);
  switch (format) {
  case OutputFormat::csv:
    write_file(path, to_csv(result.records));
    break;
  case OutputFormat::json:
    write_file(path, to_json(result).dump(2) + "\n");
    break;
  case OutputFormat::svg:
    write_file(path, to_svg(result.records, chart));
    break;
  }
  return path;
}

std::filesystem::path emit(const DistributionResult& result, OutputFormat format, const std::filesystem::path& dir,
                           const std::string& stem) {
  if (result.rows.empty()) throw Error("emit: no records to write");
  const auto path = prepare_path(dir, stem, format);
  switch (format) {
  case OutputFormat::csv:
    write_file(path, to_csv(result.rows));
    break;
  case OutputFormat::json:
    write_file(path, to_json(result).dump(2) + "\n");
    break;
  case OutputFormat::svg:
    write_file(path, to_svg(result.rows));
    break;
  }
  return path;
}

} // namespace qmeasure::harness
