#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qgps/amplification.hpp"
#include "qgps/ledger.hpp"
#include "qgps/pattern_search.hpp"

namespace qgps {

struct QuantumStepOptions {
  // Brute-force the desired count t of each step (diagnostics only; not
  // charged to the ledger).
  bool count_desired = false;
  RoundSink round_sink;
};

struct QuantumStepReport {
  SearchResult result = SearchFailure{};
  QSearchOutcome search;
  std::size_t n_points = 0;
  std::optional<std::size_t> desired_count;
  // A measured state decoded to a point that failed the classical recheck.
  bool rejected_by_recheck = false;
  std::vector<Vector> points;
};

// Seed for the modified search of one iteration, independent of the
// search-point draw.
std::uint64_t qsearch_seed(std::uint64_t seed, std::int64_t iteration);

// Objective lifted to point bits -> value bits, saturating out-of-range
// values.
std::function<BitString(const BitString&)> encoded_oracle(const Objective& objective,
                                                          const FixedPointFormat& fmt);

// One quantum search step: select N mesh points, run the modified search
// over them against the cached incumbent value, decode the measured point
// and re-evaluate it classically (one classical call). Only a strict
// improvement of the real objective is returned.
QuantumStepReport quantum_search_step(const MeshState& state, const PatternBasis& basis,
                                      const GpsConfig& config, const QSearchParams& params,
                                      const Objective& objective, OracleLedger& ledger,
                                      const QuantumStepOptions& options = {});

// Search backend for gps_run. The per-iteration search seed is derived from
// params.rng_seed.
SearchBackend quantum_backend(const PatternBasis& basis, const GpsConfig& config,
                              const QSearchParams& params, const Objective& objective,
                              QuantumStepOptions options = {});

// ---------------------------------------------------------------------------
// Backend comparison on identical point sets.

struct ComparisonRow {
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  std::size_t desired = 0;  // t, by brute force
  std::uint64_t classical_calls = 0;
  bool classical_success = false;
  std::uint64_t quantum_calls = 0;
  std::uint64_t q_applications = 0;
  std::int64_t qsearch_rounds = 0;
  std::uint64_t recheck_calls = 0;
  bool quantum_success = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  // ordered by seed
  double tau = 0.0;
  double mean_classical_calls = 0.0;
  double mean_quantum_calls = 0.0;
  double classical_success_rate = 0.0;
  double quantum_success_rate = 0.0;
  // Quantum failures among rows with t > 0.
  double miss_rate = 0.0;
  // a in quantum_calls ~ a sqrt(N/t), least squares over successful rows.
  double sqrt_fit_constant = 0.0;
};

// Per seed: config.rng_seed = seed selects X; both backends search X from
// `state`. Seeds are processed on `workers` threads (0 = hardware).
ComparisonReport compare_backends(const Objective& objective, const PatternBasis& basis,
                                  const MeshState& state, const GpsConfig& config,
                                  const QSearchParams& params, std::span<const std::uint64_t> seeds,
                                  unsigned workers = 0);

// As compare_backends, with an objective planted per seed so that exactly
// `improving` of the N selected points improve on the incumbent (value
// incumbent - 1; all others incumbent + 1).
ComparisonReport compare_planted(std::size_t improving, const PatternBasis& basis,
                                 const MeshState& state, const GpsConfig& config,
                                 const QSearchParams& params, std::span<const std::uint64_t> seeds,
                                 unsigned workers = 0);

}  // namespace qgps
