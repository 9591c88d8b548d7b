#include "qmeasure/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "qmeasure/error.hpp"

namespace qmeasure::harness {

using nlohmann::json;

std::string_view to_string(Engine e) {
  switch (e) {
  case Engine::A:
    return "A";
  case Engine::B:
    return "B";
  case Engine::C:
    return "C";
  }
  return "?";
}

Engine parse_engine(std::string_view text) {
  if (text == "A" || text == "a") return Engine::A;
  if (text == "B" || text == "b") return Engine::B;
  if (text == "C" || text == "c") return Engine::C;
  throw ConfigError("unknown engine '" + std::string(text) + "' (expected A, B or C)");
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
  case OutputFormat::csv:
    return "csv";
  case OutputFormat::json:
    return "json";
  case OutputFormat::svg:
    return "svg";
  }
  return "?";
}

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  if (text == "svg") return OutputFormat::svg;
  throw ConfigError("unknown output format '" + std::string(text) + "' (expected csv, json or svg)");
}

std::vector<double> SweepConfig::grid() const {
  return StroboscopicEngine::default_sweep_grid(points, max);
}

namespace {

std::string_view to_string(ProbabilityConvention c) {
  return c == ProbabilityConvention::norm_squared ? "norm_squared" : "norm_fourth";
}

std::string_view to_string(ImposedResults::Policy p) {
  switch (p) {
  case ImposedResults::Policy::constant:
    return "constant";
  case ImposedResults::Policy::alternating:
    return "alternating";
  case ImposedResults::Policy::listed:
    return "listed";
  }
  return "?";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Reads one JSON object, remembering which keys were consumed so that the
// rest can be reported as unknown.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  const json* find(const std::string& key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(at(key), "must be finite");
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) fail(at(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  // "a,b" or ["a", "b"]
  bool list(const std::string& key, std::vector<std::string>& out) {
    const json* v = find(key);
    if (!v) return false;
    out.clear();
    if (v->is_string()) {
      out = split_list(v->get<std::string>());
    } else if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back((*v)[i].get<std::string>());
      }
    } else {
      fail(at(key), "expected a string or an array of strings");
    }
    return true;
  }

  // number or array of numbers
  bool numbers(const std::string& key, std::vector<double>& out) {
    const json* v = find(key);
    if (!v) return false;
    out.clear();
    if (v->is_number()) {
      out.push_back(v->get<double>());
    } else if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back((*v)[i].get<double>());
      }
    } else {
      fail(at(key), "expected a number or an array of numbers");
    }
    return true;
  }

  std::optional<Section> child(const std::string& key) {
    if (const json* v = find(key)) return Section(*v, at(key));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!known_.count(it.key())) fail(at(it.key()), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

template <class T, class Parse>
std::vector<T> parse_each(const std::vector<std::string>& items, const std::string& path, Parse parse) {
  std::vector<T> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      out.push_back(parse(items[i]));
    } catch (const std::exception& e) {
      Section::fail(path + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

} // namespace

ExperimentConfig parse_config(const json& doc, const std::string& origin) {
  ExperimentConfig c;
  Section root(doc, origin);
  root.text("name", c.name);

  if (auto s = root.child("units")) {
    s->number("mass", c.units.mass);
    s->number("omega", c.units.omega);
    s->number("hbar", c.units.hbar);
    s->finish();
  }
  if (auto s = root.child("initial_state")) {
    s->number("sigma", c.sigma);
    s->number("x0", c.x0);
    s->finish();
  }
  if (auto s = root.child("filter")) {
    std::vector<std::string> kinds;
    if (s->list("kind", kinds))
      c.filters = parse_each<FilterKind>(kinds, s->at("kind"), [](const std::string& k) { return parse_filter_kind(k); });
    s->number("delta_a", c.delta_a);
    s->finish();
  }
  if (auto s = root.child("plan")) {
    s->numbers("dt_over_T", c.dt_over_T);
    if (auto w = s->child("sweep")) {
      w->count("points", c.sweep.points);
      w->number("max", c.sweep.max);
      w->finish();
    }
    s->count("measurements", c.measurements);
    if (auto r = s->child("results")) {
      std::string policy = "constant";
      r->text("policy", policy);
      if (policy == "constant") c.results.policy = ImposedResults::Policy::constant;
      else if (policy == "alternating") c.results.policy = ImposedResults::Policy::alternating;
      else if (policy == "listed") c.results.policy = ImposedResults::Policy::listed;
      else Section::fail(r->at("policy"), "expected constant, alternating or listed");
      r->number("a0", c.results.a0);
      r->numbers("values", c.results.listed);
      r->finish();
    }
    s->finish();
  }
  {
    std::vector<std::string> engines;
    if (root.list("engines", engines))
      c.engines = parse_each<Engine>(engines, root.at("engines"), [](const std::string& e) { return parse_engine(e); });
  }
  if (auto s = root.child("numerics")) {
    s->count("n_max", c.numerics.n_max);
    s->count("nodes_per_panel", c.numerics.nodes_per_panel);
    s->count("outcome_points", c.numerics.outcome_points);
    s->number("tau_over_T", c.numerics.tau_over_T);
    s->count("threads", c.numerics.threads);
    std::string convention = std::string(to_string(c.numerics.convention));
    s->text("convention", convention);
    if (convention == "norm_squared") c.numerics.convention = ProbabilityConvention::norm_squared;
    else if (convention == "norm_fourth") c.numerics.convention = ProbabilityConvention::norm_fourth;
    else Section::fail(s->at("convention"), "expected norm_squared or norm_fourth");
    if (auto l = s->child("lattice")) {
      l->number("half_width", c.numerics.lattice.half_width);
      l->count("points", c.numerics.lattice.points);
      l->number("dt_omega", c.numerics.lattice.dt_omega);
      l->count("gate_steps", c.numerics.lattice.gate_steps);
      l->count("outcome_points", c.numerics.lattice.outcome_points);
      l->finish();
    }
    s->finish();
  }
  if (auto s = root.child("output")) {
    std::string dir = c.output_directory.string();
    s->text("directory", dir);
    c.output_directory = dir;
    std::vector<std::string> formats;
    if (s->list("formats", formats))
      c.formats = parse_each<OutputFormat>(formats, s->at("formats"), [](const std::string& f) { return parse_format(f); });
    s->finish();
  }
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": parse error: " + e.what());
  }
  return parse_config(doc, path.string());
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + ": must be positive");
  };
  positive(units.mass, "units.mass");
  positive(units.omega, "units.omega");
  positive(units.hbar, "units.hbar");
  positive(sigma, "initial_state.sigma");
  positive(delta_a, "filter.delta_a");
  if (filters.empty()) throw ConfigError("filter.kind: at least one filter kind is required");
  if (dt_over_T.empty()) throw ConfigError("plan.dt_over_T: at least one value is required");
  for (double r : dt_over_T) positive(r, "plan.dt_over_T");
  if (sweep.points < 1) throw ConfigError("plan.sweep.points: must be at least 1");
  positive(sweep.max, "plan.sweep.max");
  if (measurements < 1) throw ConfigError("plan.measurements: must be at least 1");
  if (results.policy == ImposedResults::Policy::listed && results.listed.size() + 1 < measurements)
    throw ConfigError("plan.results.values: " + std::to_string(measurements - 1) + " imposed results needed");
  if (engines.empty()) throw ConfigError("engines: at least one engine is required");
  for (std::size_t i = 0; i < engines.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (engines[i] == engines[j]) throw ConfigError("engines: duplicate engine " + std::string(to_string(engines[i])));
  const bool step = std::find(filters.begin(), filters.end(), FilterKind::step) != filters.end();
  for (Engine e : engines) {
    if (step && e == Engine::B)
      throw ConfigError("engines: engine B integrates the Gaussian measurement potential only and cannot run "
                        "the step filter");
    if (step && e == Engine::A)
      throw ConfigError("engines: engine A propagates Gaussian packets and cannot run the step filter");
  }
  if (numerics.n_max < 1) throw ConfigError("numerics.n_max: must be at least 1");
  if (numerics.nodes_per_panel < 2) throw ConfigError("numerics.nodes_per_panel: must be at least 2");
  if (numerics.outcome_points < 3) throw ConfigError("numerics.outcome_points: must be at least 3");
  positive(numerics.tau_over_T, "numerics.tau_over_T");
  const double smallest = std::min(*std::min_element(dt_over_T.begin(), dt_over_T.end()), sweep.max / sweep.points);
  if (numerics.tau_over_T >= smallest)
    throw ConfigError("numerics.tau_over_T: measurement duration must be shorter than every quiescent time");
  positive(numerics.lattice.half_width, "numerics.lattice.half_width");
  if (numerics.lattice.points < 3) throw ConfigError("numerics.lattice.points: must be at least 3");
  positive(numerics.lattice.dt_omega, "numerics.lattice.dt_omega");
  if (numerics.lattice.gate_steps < 1) throw ConfigError("numerics.lattice.gate_steps: must be at least 1");
  if (numerics.lattice.outcome_points < 3) throw ConfigError("numerics.lattice.outcome_points: must be at least 3");
  if (formats.empty()) throw ConfigError("output.formats: at least one format is required");
}

StroboscopicPlan ExperimentConfig::plan(double ratio, FilterKind kind) const {
  StroboscopicPlan p;
  p.quiescent_time = ratio * units.period();
  p.count = measurements;
  p.results = results;
  p.kind = kind;
  p.delta_a = delta_a;
  return p;
}

json to_json(const ExperimentConfig& c) {
  json filters = json::array();
  for (auto k : c.filters) filters.push_back(std::string(to_string(k)));
  json engines = json::array();
  for (auto e : c.engines) engines.push_back(std::string(to_string(e)));
  json formats = json::array();
  for (auto f : c.formats) formats.push_back(std::string(to_string(f)));
  json results = {{"policy", std::string(to_string(c.results.policy))}, {"a0", c.results.a0}};
  if (c.results.policy == ImposedResults::Policy::listed) results["values"] = c.results.listed;
  json doc = {
      {"units", {{"mass", c.units.mass}, {"omega", c.units.omega}, {"hbar", c.units.hbar}}},
      {"initial_state", {{"sigma", c.sigma}, {"x0", c.x0}}},
      {"filter", {{"kind", filters}, {"delta_a", c.delta_a}}},
      {"plan",
       {{"dt_over_T", c.dt_over_T},
        {"sweep", {{"points", c.sweep.points}, {"max", c.sweep.max}}},
        {"measurements", c.measurements},
        {"results", results}}},
      {"engines", engines},
      {"numerics",
       {{"n_max", c.numerics.n_max},
        {"nodes_per_panel", c.numerics.nodes_per_panel},
        {"outcome_points", c.numerics.outcome_points},
        {"tau_over_T", c.numerics.tau_over_T},
        {"convention", std::string(to_string(c.numerics.convention))},
        {"threads", c.numerics.threads},
        {"lattice",
         {{"half_width", c.numerics.lattice.half_width},
          {"points", c.numerics.lattice.points},
          {"dt_omega", c.numerics.lattice.dt_omega},
          {"gate_steps", c.numerics.lattice.gate_steps},
          {"outcome_points", c.numerics.lattice.outcome_points}}}}},
      {"output", {{"directory", c.output_directory.string()}, {"formats", formats}}},
  };
  if (!c.name.empty()) doc["name"] = c.name;
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("config_hash: SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

} // namespace qmeasure::harness
