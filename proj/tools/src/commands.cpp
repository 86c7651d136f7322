#include "qgps/app/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "qgps/app/objectives.hpp"
#include "qgps/errors.hpp"
#include "qgps/parallel.hpp"

namespace qgps::app {
namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector start_point(const RunConfig& config) {
  if (!config.initial_point.empty()) {
    return Eigen::Map<const Vector>(config.initial_point.data(),
                                    static_cast<Eigen::Index>(config.initial_point.size()));
  }
  return find_objective(config.objective_name).default_start(config.dimension);
}

template <class Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

nlohmann::json iteration_record_json(const IterationRecord& r, std::size_t trial, std::uint64_t seed) {
  return {
      {"type", "iteration"},
      {"trial", trial},
      {"seed", seed},
      {"k", r.iteration},
      {"x", to_std(r.iterate)},
      {"f", r.value},
      {"delta", r.mesh_size},
      {"outcome", std::string(to_string(r.outcome))},
      {"classical_calls", r.ledger_snapshot.classical_calls},
      {"quantum_calls", r.ledger_snapshot.quantum_calls},
      {"qsearch_rounds", r.ledger_snapshot.qsearch_rounds},
      {"q_applications", r.ledger_snapshot.q_applications},
  };
}

nlohmann::json summary_record_json(const GpsResult& result, const RunConfig& config, std::size_t trial,
                                   std::uint64_t seed) {
  return {
      {"type", "summary"},
      {"trial", trial},
      {"seed", seed},
      {"final_iterate", to_std(result.final_state.iterate)},
      {"final_value", result.final_state.incumbent_value},
      {"final_mesh_size", result.final_state.mesh_size},
      {"iterations", result.final_state.iteration},
      {"termination", std::string(to_string(result.termination))},
      {"classical_calls", result.ledger.classical_calls},
      {"quantum_calls", result.ledger.quantum_calls},
      {"qsearch_rounds", result.ledger.qsearch_rounds},
      {"q_applications", result.ledger.q_applications},
      {"config", to_json(config)},
  };
}

GpsResult run_trial(const RunConfig& config, std::size_t trial) {
  const std::uint64_t seed = config.seed + trial;
  const Objective objective = make_objective(config.objective_name, config.dimension);
  const PatternBasis basis = PatternBasis::coordinate(config.dimension);
  GpsConfig gps = config.gps;
  gps.rng_seed = seed;
  QSearchParams params = config.qsearch;
  params.rng_seed = seed;
  const SearchBackend backend = config.backend == Backend::kQuantum
                                    ? quantum_backend(basis, gps, params, objective)
                                    : classical_backend(basis, gps, objective);
  return gps_run(objective, basis, start_point(config), gps, backend);
}

void write_run_trace(const RunConfig& config, std::ostream& trace) {
  std::vector<GpsResult> results(config.trials);
  parallel_for(config.trials, config.workers,
               [&](std::size_t trial) { results[trial] = run_trial(config, trial); });
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const GpsResult& result = results[trial];
    const std::uint64_t seed = config.seed + trial;
    for (const auto& record : result.trace) trace << iteration_record_json(record, trial, seed).dump() << '\n';
    trace << summary_record_json(result, config, trial, seed).dump() << '\n';
  }
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    if (config.output_path.empty()) {
      write_run_trace(config, out);
    } else {
      std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError(config.output_path, 0, "cannot open output file");
      write_run_trace(config, file);
    }
    return 0;
  });
}

std::vector<AmplifyRow> demo_amplify(std::size_t n_points, std::size_t t, std::int64_t j_max,
                                     std::size_t trials, std::uint64_t seed) {
  if (n_points == 0 || (n_points & (n_points - 1)) != 0) throw DomainError("N must be a power of two");
  if (t > n_points) throw DomainError("t exceeds N");
  if (trials == 0) throw DomainError("trials must be at least 1");

  PlantedProblem planted = make_planted_problem(n_points, t, seed);
  GroverIterate iterate(planted.problem);
  StatePreparation& prep = iterate.preparation();
  OracleLedger ledger;
  SparseState state = iterate.prepare(ledger);
  Rng rng(seed);

  std::vector<AmplifyRow> rows;
  for (std::int64_t j = 0; j <= j_max; ++j) {
    if (j > 0) iterate.apply(state, ledger);
    AmplifyRow row;
    row.j = j;
    row.analytic = analytic_success_probability(n_points, t, j);
    row.simulated = state.probability([&](const BitString& b) { return prep.is_desired(b); });
    BornSampler sampler(state);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < trials; ++k) hits += prep.is_desired(sampler.draw(rng)) ? 1 : 0;
    row.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    row.abs_error = std::abs(row.empirical - row.analytic);
    row.sigma = std::sqrt(row.analytic * (1.0 - row.analytic) / static_cast<double>(trials));
    rows.push_back(row);
  }
  return rows;
}

void print_amplify_table(const std::vector<AmplifyRow>& rows, std::ostream& out) {
  out << std::setw(4) << "j" << std::setw(14) << "analytic" << std::setw(14) << "simulated"
      << std::setw(14) << "empirical" << std::setw(14) << "abs_error" << '\n';
  out << std::fixed << std::setprecision(6);
  for (const auto& r : rows) {
    out << std::setw(4) << r.j << std::setw(14) << r.analytic << std::setw(14) << r.simulated
        << std::setw(14) << r.empirical << std::setw(14) << r.abs_error << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

ComparisonReport compare_from_config(const RunConfig& config) {
  config.validate();
  const PatternBasis basis = PatternBasis::coordinate(config.dimension);
  std::vector<std::uint64_t> seeds(config.trials);
  std::iota(seeds.begin(), seeds.end(), config.seed);

  MeshState state;
  state.iterate = start_point(config);
  state.mesh_size = config.gps.initial_mesh_size;
  if (config.planted_improving) {
    state.incumbent_value = 0.0;
    return compare_planted(*config.planted_improving, basis, state, config.gps, config.qsearch, seeds,
                           config.workers);
  }
  const Objective objective = make_objective(config.objective_name, config.dimension);
  state.incumbent_value = objective(state.iterate);
  return compare_backends(objective, basis, state, config.gps, config.qsearch, seeds, config.workers);
}

void write_comparison(const ComparisonReport& report, const RunConfig& config, std::ostream& rows,
                      std::ostream& human) {
  for (const auto& r : report.rows) {
    rows << nlohmann::json{
                {"type", "comparison"},
                {"seed", r.seed},
                {"n_points", r.n_points},
                {"desired", r.desired},
                {"classical_calls", r.classical_calls},
                {"classical_success", r.classical_success},
                {"quantum_calls", r.quantum_calls},
                {"q_applications", r.q_applications},
                {"qsearch_rounds", r.qsearch_rounds},
                {"recheck_calls", r.recheck_calls},
                {"quantum_success", r.quantum_success},
            }.dump()
         << '\n';
  }
  rows << nlohmann::json{
              {"type", "comparison_summary"},
              {"trials", report.rows.size()},
              {"tau", report.tau},
              {"miss_rate", report.miss_rate},
              {"mean_classical_calls", report.mean_classical_calls},
              {"mean_quantum_calls", report.mean_quantum_calls},
              {"classical_success_rate", report.classical_success_rate},
              {"quantum_success_rate", report.quantum_success_rate},
              {"sqrt_fit_constant", report.sqrt_fit_constant},
              {"config", to_json(config)},
          }.dump()
       << '\n';

  human << "trials:                  " << report.rows.size() << '\n'
        << "N (search points):       " << config.gps.search_points_count << '\n'
        << "tau:                     " << report.tau << '\n'
        << "mean classical calls:    " << report.mean_classical_calls << '\n'
        << "mean quantum calls:      " << report.mean_quantum_calls << '\n'
        << "classical success rate:  " << report.classical_success_rate << '\n'
        << "quantum success rate:    " << report.quantum_success_rate << '\n'
        << "observed miss rate:      " << report.miss_rate << '\n'
        << "fit calls ~ a*sqrt(N/t): a = " << report.sqrt_fit_constant << '\n';
}

int compare_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ComparisonReport report = compare_from_config(config);
    if (config.output_path.empty()) {
      write_comparison(report, config, out, out);
    } else {
      std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError(config.output_path, 0, "cannot open output file");
      write_comparison(report, config, file, out);
    }
    return 0;
  });
}

void list_objectives(std::ostream& out) {
  for (const auto& e : objective_registry()) {
    out << e.name << "\t" << e.description << "\t(dimension " << e.min_dimension;
    if (e.max_dimension == 0) {
      out << "+";
    } else if (e.max_dimension != e.min_dimension) {
      out << ".." << e.max_dimension;
    }
    out << ")\n";
  }
}

}  // namespace qgps::app
