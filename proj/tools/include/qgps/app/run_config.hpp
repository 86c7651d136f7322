#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgps/amplification.hpp"
#include "qgps/errors.hpp"
#include "qgps/pattern_search.hpp"

namespace qgps::app {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class Backend { kClassical, kQuantum };

struct RunConfig {
  std::string objective_name = "sphere";
  std::size_t dimension = 2;
  std::vector<double> initial_point;  // empty: the objective's default start
  GpsConfig gps;
  QSearchParams qsearch;
  Backend backend = Backend::kQuantum;
  std::string output_path;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  // compare: plant this many improving points instead of using the objective.
  std::optional<std::size_t> planted_improving;
  unsigned workers = 0;

  void validate() const;
};

// `key = value` lines; '#' starts a comment; blank lines ignored. Unknown
// keys and malformed values raise ConfigError with the line number.
RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);

// Applies one `key=value` override (command-line flags).
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::string& source = "<command line>", std::size_t line = 0);

// Every recognised key, for help output.
std::vector<std::string> config_keys();

nlohmann::json to_json(const RunConfig& config);

}  // namespace qgps::app
