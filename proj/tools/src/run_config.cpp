#include "qgps/app/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qgps/app/objectives.hpp"

namespace qgps::app {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string raw;
  const std::string& source;
  std::size_t line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source, line, "key '" + key + "': " + what + " (got '" + raw + "')");
  }

  double real() const {
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) fail("expected a number");
      return v;
    } catch (const std::logic_error&) {
      fail("expected a number");
    }
  }

  template <class Int>
  Int integer() const {
    Int v{};
    const auto* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(raw.data(), end, v);
    if (ec != std::errc{} || ptr != end) fail("expected an integer");
    return v;
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      Field f{trim(item), source, line, key};
      out.push_back(f.real());
    }
    if (out.empty()) fail("expected a comma-separated list of numbers");
    return out;
  }
};

using Setter = std::function<void(RunConfig&, const Field&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"objective", [](RunConfig& c, const Field& f) { c.objective_name = f.raw; }},
      {"dimension", [](RunConfig& c, const Field& f) { c.dimension = f.integer<std::size_t>(); }},
      {"initial_point", [](RunConfig& c, const Field& f) { c.initial_point = f.reals(); }},
      {"backend",
       [](RunConfig& c, const Field& f) {
         if (f.raw == "classical") {
           c.backend = Backend::kClassical;
         } else if (f.raw == "quantum") {
           c.backend = Backend::kQuantum;
         } else {
           f.fail("expected 'classical' or 'quantum'");
         }
       }},
      {"output", [](RunConfig& c, const Field& f) { c.output_path = f.raw; }},
      {"trials", [](RunConfig& c, const Field& f) { c.trials = f.integer<std::size_t>(); }},
      {"seed", [](RunConfig& c, const Field& f) { c.seed = f.integer<std::uint64_t>(); }},
      {"workers", [](RunConfig& c, const Field& f) { c.workers = f.integer<unsigned>(); }},
      {"initial_mesh_size", [](RunConfig& c, const Field& f) { c.gps.initial_mesh_size = f.real(); }},
      {"expansion_factor", [](RunConfig& c, const Field& f) { c.gps.expansion_factor = f.real(); }},
      {"contraction_factor", [](RunConfig& c, const Field& f) { c.gps.contraction_factor = f.real(); }},
      {"mesh_size_tolerance", [](RunConfig& c, const Field& f) { c.gps.mesh_size_tolerance = f.real(); }},
      {"max_iterations", [](RunConfig& c, const Field& f) { c.gps.max_iterations = f.integer<std::int64_t>(); }},
      {"oracle_budget", [](RunConfig& c, const Field& f) { c.gps.oracle_budget = f.integer<std::uint64_t>(); }},
      {"search_points", [](RunConfig& c, const Field& f) { c.gps.search_points_count = f.integer<std::size_t>(); }},
      {"search_radius", [](RunConfig& c, const Field& f) { c.gps.search_radius = f.integer<int>(); }},
      {"total_bits", [](RunConfig& c, const Field& f) { c.gps.fixed_point_format.total_bits = f.integer<int>(); }},
      {"frac_bits", [](RunConfig& c, const Field& f) { c.gps.fixed_point_format.frac_bits = f.integer<int>(); }},
      {"c", [](RunConfig& c, const Field& f) { c.qsearch.c = f.real(); }},
      {"tau", [](RunConfig& c, const Field& f) { c.qsearch.tau = f.real(); }},
      {"max_total_rounds", [](RunConfig& c, const Field& f) { c.qsearch.max_total_rounds = f.integer<std::int64_t>(); }},
      {"planted_improving",
       [](RunConfig& c, const Field& f) {
         if (f.raw == "none") {
           c.planted_improving.reset();
         } else {
           c.planted_improving = f.integer<std::size_t>();
         }
       }},
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::string& source, std::size_t line) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(source, line, "unknown key '" + key + "'");
  it->second(config, Field{value, source, line, key});
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "missing key before '='");
    apply_setting(config, key, value, source, line_no);
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  return parse_run_config(in, path);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) keys.push_back(key);
  return keys;
}

void RunConfig::validate() const {
  const ObjectiveEntry& entry = find_objective(objective_name);
  if (dimension < entry.min_dimension || (entry.max_dimension != 0 && dimension > entry.max_dimension)) {
    throw ConfigError("<config>", 0, "objective '" + objective_name + "' does not support dimension " +
                                         std::to_string(dimension));
  }
  if (!initial_point.empty() && initial_point.size() != dimension) {
    throw ConfigError("<config>", 0, "initial_point has " + std::to_string(initial_point.size()) +
                                         " coordinates, dimension is " + std::to_string(dimension));
  }
  if (trials == 0) throw ConfigError("<config>", 0, "trials must be at least 1");
  try {
    gps.validate();
    qsearch.validate();
  } catch (const Error& e) {
    throw ConfigError("<config>", 0, e.what());
  }
}

nlohmann::json to_json(const RunConfig& c) {
  return {
      {"objective", c.objective_name},
      {"dimension", c.dimension},
      {"initial_point", c.initial_point},
      {"backend", c.backend == Backend::kQuantum ? "quantum" : "classical"},
      {"trials", c.trials},
      {"seed", c.seed},
      {"initial_mesh_size", c.gps.initial_mesh_size},
      {"expansion_factor", c.gps.expansion_factor},
      {"contraction_factor", c.gps.contraction_factor},
      {"mesh_size_tolerance", c.gps.mesh_size_tolerance},
      {"max_iterations", c.gps.max_iterations},
      {"oracle_budget", c.gps.oracle_budget},
      {"search_points", c.gps.search_points_count},
      {"search_radius", c.gps.search_radius},
      {"total_bits", c.gps.fixed_point_format.total_bits},
      {"frac_bits", c.gps.fixed_point_format.frac_bits},
      {"c", c.qsearch.c},
      {"tau", c.qsearch.tau},
      {"max_total_rounds", c.qsearch.max_total_rounds},
      {"planted_improving", c.planted_improving ? nlohmann::json(*c.planted_improving) : nlohmann::json("none")},
  };
}

}  // namespace qgps::app
