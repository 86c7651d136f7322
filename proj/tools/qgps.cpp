// qgps: pattern search with a classical or simulated-quantum search step.
//
//   qgps run --config run.cfg [--set key=value ...]
//   qgps demo-amplify --points 16 --marked 1 --j-max 10 --trials 100000
//   qgps compare --config compare.cfg [--set key=value ...]
//   qgps list-objectives

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qgps/app/commands.hpp"
#include "qgps/app/run_config.hpp"

namespace {

struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", opts.overrides, "override a config key (key=value); repeatable");
}

// File values first, then --set overrides in order.
qgps::app::RunConfig resolve(const ConfigOptions& opts) {
  qgps::app::RunConfig config;
  if (!opts.config_path.empty()) config = qgps::app::load_run_config(opts.config_path);
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw qgps::app::ConfigError("--set", 0, "expected key=value, got '" + kv + "'");
    }
    qgps::app::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized pattern search with a simulated quantum search step"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  auto* run = app.add_subcommand("run", "run GPS and write a line-delimited JSON trace");
  add_config_options(run, run_opts);

  ConfigOptions compare_opts;
  auto* compare = app.add_subcommand("compare", "compare classical and quantum search steps on identical point sets");
  add_config_options(compare, compare_opts);

  std::size_t points = 16;
  std::size_t marked = 1;
  std::int64_t j_max = 10;
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
  std::string demo_output;
  auto* demo = app.add_subcommand("demo-amplify", "sweep amplification rounds: analytic vs simulated vs sampled");
  demo->add_option("-N,--points", points, "number of points (power of two)");
  demo->add_option("-t,--marked", marked, "number of marked points");
  demo->add_option("-j,--j-max", j_max, "largest number of iterate applications");
  demo->add_option("--trials", trials, "measurements per row");
  demo->add_option("--seed", seed, "seed for the marking and the measurements");
  demo->add_option("-o,--output", demo_output, "also write rows as JSON lines to this file");

  auto* list = app.add_subcommand("list-objectives", "list the registered objective functions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return qgps::app::run_command(resolve(run_opts), std::cout, std::cerr);
    if (compare->parsed()) return qgps::app::compare_command(resolve(compare_opts), std::cout, std::cerr);
    if (list->parsed()) {
      qgps::app::list_objectives(std::cout);
      return 0;
    }
    if (demo->parsed()) {
      const auto rows = qgps::app::demo_amplify(points, marked, j_max, trials, seed);
      qgps::app::print_amplify_table(rows, std::cout);
      if (!demo_output.empty()) {
        std::ofstream out(demo_output, std::ios::binary | std::ios::trunc);
        for (const auto& r : rows) {
          out << nlohmann::json{{"j", r.j},
                                {"analytic", r.analytic},
                                {"simulated", r.simulated},
                                {"empirical", r.empirical},
                                {"abs_error", r.abs_error},
                                {"sigma", r.sigma}}
                     .dump()
              << '\n';
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
