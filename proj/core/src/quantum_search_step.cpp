#include "qgps/quantum_search_step.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_set>

#include "qgps/errors.hpp"
#include "qgps/parallel.hpp"

namespace qgps {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ComparisonRow compare_one(const Objective& objective, const PatternBasis& basis,
                          const MeshState& state, GpsConfig config, QSearchParams params,
                          std::uint64_t seed) {
  config.rng_seed = seed;
  params.rng_seed = mix(seed ^ 0xC0FFEEULL);

  ComparisonRow row;
  row.seed = seed;

  Rng rng = search_point_rng(config.rng_seed, state.iteration);
  const SearchPoints x = select_search_points(state, basis, config, rng);
  row.n_points = x.points.size();

  OracleLedger classical;
  const SearchResult c = classical_search_step(x.points, objective, state.incumbent_value, classical);
  row.classical_calls = classical.classical_calls;
  row.classical_success = std::holds_alternative<ImprovedPoint>(c);

  OracleLedger quantum;
  QuantumStepOptions options;
  options.count_desired = true;
  const QuantumStepReport q =
      quantum_search_step(state, basis, config, params, objective, quantum, options);
  row.desired = q.desired_count.value_or(0);
  row.quantum_calls = quantum.quantum_calls;
  row.q_applications = quantum.q_applications;
  row.qsearch_rounds = q.search.rounds_executed;
  row.recheck_calls = quantum.classical_calls;
  row.quantum_success = std::holds_alternative<ImprovedPoint>(q.result);
  return row;
}

ComparisonReport summarize(std::vector<ComparisonRow> rows, const QSearchParams& params) {
  ComparisonReport report;
  report.tau = params.tau;
  report.rows = std::move(rows);
  if (report.rows.empty()) return report;
  const auto count = static_cast<double>(report.rows.size());
  std::size_t with_desired = 0;
  std::size_t missed = 0;
  double fit_num = 0.0;
  double fit_den = 0.0;
  for (const auto& r : report.rows) {
    report.mean_classical_calls += static_cast<double>(r.classical_calls);
    report.mean_quantum_calls += static_cast<double>(r.quantum_calls);
    report.classical_success_rate += r.classical_success ? 1.0 : 0.0;
    report.quantum_success_rate += r.quantum_success ? 1.0 : 0.0;
    if (r.desired > 0) {
      ++with_desired;
      if (!r.quantum_success) ++missed;
      if (r.quantum_success) {
        const double s = std::sqrt(static_cast<double>(r.n_points) / static_cast<double>(r.desired));
        fit_num += static_cast<double>(r.quantum_calls) * s;
        fit_den += s * s;
      }
    }
  }
  report.mean_classical_calls /= count;
  report.mean_quantum_calls /= count;
  report.classical_success_rate /= count;
  report.quantum_success_rate /= count;
  report.miss_rate = with_desired == 0 ? 0.0 : static_cast<double>(missed) / static_cast<double>(with_desired);
  report.sqrt_fit_constant = fit_den > 0.0 ? fit_num / fit_den : 0.0;
  return report;
}

}  // namespace

std::uint64_t qsearch_seed(std::uint64_t seed, std::int64_t iteration) {
  return mix(mix(seed ^ 0x9A5EULL) + static_cast<std::uint64_t>(iteration));
}

std::function<BitString(const BitString&)> encoded_oracle(const Objective& objective,
                                                          const FixedPointFormat& fmt) {
  return [objective, fmt](const BitString& point_bits) {
    const std::vector<double> coords = decode_point(point_bits, fmt);
    const Vector x = Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size()));
    const double value = objective(x);
    if (std::isnan(value)) return encode_raw(fmt.max_raw(), fmt);
    return encode_scalar(value, fmt, OverflowPolicy::kSaturate).bits;
  };
}

QuantumStepReport quantum_search_step(const MeshState& state, const PatternBasis& basis,
                                      const GpsConfig& config, const QSearchParams& params,
                                      const Objective& objective, OracleLedger& ledger,
                                      const QuantumStepOptions& options) {
  const FixedPointFormat& fmt = config.fixed_point_format;
  QuantumStepReport report;

  Rng rng = search_point_rng(config.rng_seed, state.iteration);
  SearchPoints x = select_search_points(state, basis, config, rng);
  report.n_points = x.points.size();

  SearchProblem problem;
  problem.layout = RegisterLayout::for_points(basis.dimension(), fmt);
  problem.points = x.encoded;
  // Cached incumbent: encoding f(x_k) costs no oracle call.
  problem.incumbent_value_bits = encode_scalar(state.incumbent_value, fmt, OverflowPolicy::kSaturate).bits;
  problem.oracle = encoded_oracle(objective, fmt);
  if (options.count_desired) report.desired_count = count_desired(problem);

  QSearchParams step_params = params;
  step_params.rng_seed = qsearch_seed(params.rng_seed, state.iteration);
  report.search = modified_qsearch(problem, step_params, options.round_sink);
  ledger += report.search.ledger_delta;
  report.points = std::move(x.points);

  if (report.search.failed()) return report;

  const BitString point_bits = report.search.found->slice(problem.layout.point_offset(), problem.layout.point_bits);
  const std::vector<double> coords = decode_point(point_bits, fmt);
  Vector candidate = Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size()));
  const double value = objective(candidate);
  ++ledger.classical_calls;
  if (value < state.incumbent_value) {
    report.result = ImprovedPoint{std::move(candidate), value};
  } else {
    report.rejected_by_recheck = true;
  }
  return report;
}

SearchBackend quantum_backend(const PatternBasis& basis, const GpsConfig& config,
                              const QSearchParams& params, const Objective& objective,
                              QuantumStepOptions options) {
  return [basis, config, params, objective, options](const MeshState& state, OracleLedger& ledger,
                                                     std::vector<Vector>& candidates) -> SearchResult {
    QuantumStepReport report =
        quantum_search_step(state, basis, config, params, objective, ledger, options);
    candidates.insert(candidates.end(), report.points.begin(), report.points.end());
    return report.result;
  };
}

ComparisonReport compare_backends(const Objective& objective, const PatternBasis& basis,
                                  const MeshState& state, const GpsConfig& config,
                                  const QSearchParams& params, std::span<const std::uint64_t> seeds,
                                  unsigned workers) {
  config.validate();
  params.validate();
  std::vector<ComparisonRow> rows(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    rows[i] = compare_one(objective, basis, state, config, params, seeds[i]);
  });
  return summarize(std::move(rows), params);
}

ComparisonReport compare_planted(std::size_t improving, const PatternBasis& basis,
                                 const MeshState& state, const GpsConfig& config,
                                 const QSearchParams& params, std::span<const std::uint64_t> seeds,
                                 unsigned workers) {
  config.validate();
  params.validate();
  if (improving > config.search_points_count) throw DomainError("more improving points than N");
  const FixedPointFormat fmt = config.fixed_point_format;
  const double incumbent = state.incumbent_value;

  std::vector<ComparisonRow> rows(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    GpsConfig seeded = config;
    seeded.rng_seed = seeds[i];
    Rng rng = search_point_rng(seeded.rng_seed, state.iteration);
    const SearchPoints x = select_search_points(state, basis, seeded, rng);

    std::vector<std::size_t> order(x.encoded.size());
    std::iota(order.begin(), order.end(), 0);
    Rng plant_rng(mix(seeds[i] ^ 0x9147EDULL));
    std::shuffle(order.begin(), order.end(), plant_rng);
    auto planted = std::make_shared<std::unordered_set<BitString>>();
    for (std::size_t k = 0; k < improving; ++k) planted->insert(x.encoded[order[k]]);

    Objective objective = [planted, fmt, incumbent](const Vector& y) {
      for (Eigen::Index c = 0; c < y.size(); ++c) {
        if (!is_representable(y(c), fmt)) return incumbent + 1.0;
      }
      const BitString bits = encode_point(std::span(y.data(), static_cast<std::size_t>(y.size())), fmt);
      return planted->count(bits) ? incumbent - 1.0 : incumbent + 1.0;
    };
    rows[i] = compare_one(objective, basis, state, config, params, seeds[i]);
  });
  return summarize(std::move(rows), params);
}

}  // namespace qgps
