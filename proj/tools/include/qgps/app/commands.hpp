#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgps/app/run_config.hpp"
#include "qgps/pattern_search.hpp"
#include "qgps/quantum_search_step.hpp"

namespace qgps::app {

// Trace schema (one JSON object per line):
//   {"type":"iteration","trial","seed","k","x","f","delta","outcome",
//    "classical_calls","quantum_calls","qsearch_rounds","q_applications"}
//   {"type":"summary","trial","seed","final_iterate","final_value",
//    "final_mesh_size","iterations","termination","classical_calls",
//    "quantum_calls","qsearch_rounds","q_applications","config"}
nlohmann::json iteration_record_json(const IterationRecord& record, std::size_t trial, std::uint64_t seed);
nlohmann::json summary_record_json(const GpsResult& result, const RunConfig& config, std::size_t trial,
                                   std::uint64_t seed);

// One GPS run for trial `trial` (seed = config.seed + trial).
GpsResult run_trial(const RunConfig& config, std::size_t trial);

// Runs every trial and writes the trace to `trace` in trial order.
void write_run_trace(const RunConfig& config, std::ostream& trace);

// `run` subcommand: validates, runs, writes to config.output_path (stdout
// when empty). Returns a process exit code; diagnostics go to `err`.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

struct AmplifyRow {
  std::int64_t j = 0;
  double analytic = 0.0;   // sin^2((2j+1) theta)
  double simulated = 0.0;  // exact desired probability of the simulated state
  double empirical = 0.0;  // frequency over `trials` measurements
  double abs_error = 0.0;  // |empirical - analytic|
  double sigma = 0.0;      // binomial standard error at the analytic p
};

std::vector<AmplifyRow> demo_amplify(std::size_t n_points, std::size_t t, std::int64_t j_max,
                                     std::size_t trials, std::uint64_t seed);
void print_amplify_table(const std::vector<AmplifyRow>& rows, std::ostream& out);

// `compare` subcommand: comparison report as JSON lines (one per seed and a
// summary) plus a human-readable table.
ComparisonReport compare_from_config(const RunConfig& config);
void write_comparison(const ComparisonReport& report, const RunConfig& config, std::ostream& rows,
                      std::ostream& human);
int compare_command(const RunConfig& config, std::ostream& out, std::ostream& err);

void list_objectives(std::ostream& out);

}  // namespace qgps::app
