#include "qgps/pattern_search.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "qgps/errors.hpp"

namespace qgps {
namespace {

constexpr double kFeasibilityTolerance = 1e-9;

bool is_power_of_two(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int exponent = 0;
  return std::frexp(v, &exponent) == 0.5;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Lawson-Hanson non-negative least squares: argmin ||A x - b|| over x >= 0.
Vector nnls(const Matrix& a, const Vector& b) {
  const Eigen::Index p = a.cols();
  Vector x = Vector::Zero(p);
  std::vector<bool> passive(static_cast<std::size_t>(p), false);
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());

  auto solve_passive = [&](const std::vector<bool>& set) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (set[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Vector coeffs = sub.completeOrthogonalDecomposition().solve(b);
    Vector s = Vector::Zero(p);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = coeffs(static_cast<Eigen::Index>(k));
    return s;
  };

  for (Eigen::Index outer = 0; outer < 3 * p + 10; ++outer) {
    const Vector w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > tol && (best < 0 || w(j) > w(best))) best = j;
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (Eigen::Index inner = 0; inner < 3 * p + 10; ++inner) {
      const Vector s = solve_passive(passive);
      bool all_positive = true;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) all_positive = false;
      }
      if (all_positive) {
        x = s;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - s(j)));
        }
      }
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < p; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
  }
  return x;
}

// b in cone(columns), deciding with bases of n columns (Caratheodory).
bool in_cone_by_enumeration(const Matrix& d, const Vector& b) {
  const auto n = static_cast<int>(d.rows());
  const auto p = static_cast<int>(d.cols());
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    Matrix sub(n, n);
    for (int i = 0; i < n; ++i) sub.col(i) = d.col(pick[static_cast<std::size_t>(i)]);
    if (std::abs(sub.determinant()) > 1e-12) {
      const Vector lambda = sub.partialPivLu().solve(b);
      if (lambda.minCoeff() >= -kFeasibilityTolerance) return true;
    }
    // Next combination in lexicographic order.
    int i = n - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == p - n + i) --i;
    if (i < 0) return false;
    ++pick[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
  }
}

bool in_cone(const Matrix& d, const Vector& b) {
  if (d.rows() <= 3) return in_cone_by_enumeration(d, b);
  const Vector x = nnls(d, b);
  return (d * x - b).norm() <= kFeasibilityTolerance * std::max(1.0, b.norm());
}

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Visits z in {0..zmax}^p with sum(z) == total, stopping once visit returns false.
bool for_each_with_sum(std::vector<int>& z, std::size_t pos, int remaining, int zmax,
                       const std::function<bool(const std::vector<int>&)>& visit) {
  if (pos + 1 == z.size()) {
    if (remaining > zmax) return true;
    z[pos] = remaining;
    return visit(z);
  }
  for (int v = std::min(remaining, zmax); v >= 0; --v) {
    z[pos] = v;
    if (!for_each_with_sum(z, pos + 1, remaining - v, zmax, visit)) return false;
  }
  return true;
}

}  // namespace

bool positive_spanning_check(const Matrix& directions) {
  const Eigen::Index n = directions.rows();
  const Eigen::Index p = directions.cols();
  if (n == 0) throw DimensionMismatchError("direction matrix has no rows");
  if (p < n + 1) return false;
  if (Eigen::FullPivLU<Matrix>(directions).rank() < n) return false;

  std::vector<Vector> probes;
  for (Eigen::Index i = 0; i < n; ++i) {
    probes.push_back(Vector::Unit(n, i));
    probes.push_back(-Vector::Unit(n, i));
  }
  Rng rng(0x5eedULL);
  std::normal_distribution<double> normal;
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    probes.push_back(v.normalized());
  }
  return std::all_of(probes.begin(), probes.end(),
                     [&](const Vector& b) { return in_cone(directions, b); });
}

PatternBasis::PatternBasis(Matrix generating, IntMatrix integer_directions)
    : generating_(std::move(generating)), integer_directions_(std::move(integer_directions)) {
  if (generating_.rows() == 0 || generating_.rows() != generating_.cols()) {
    throw DimensionMismatchError("generating matrix must be square and non-empty");
  }
  if (integer_directions_.rows() != generating_.rows()) {
    throw DimensionMismatchError("Z must have as many rows as G");
  }
  if (std::abs(generating_.determinant()) <= 1e-12) {
    throw DomainError("generating matrix is singular");
  }
  directions_ = generating_ * integer_directions_.cast<double>();
  if (!positive_spanning_check(directions_)) {
    throw NotPositiveSpanningError("columns of D = G Z do not positively span R^n");
  }
}

PatternBasis PatternBasis::coordinate(std::size_t dimension) {
  const auto n = static_cast<Eigen::Index>(dimension);
  IntMatrix z(n, 2 * n);
  z << IntMatrix::Identity(n, n), -IntMatrix::Identity(n, n);
  return PatternBasis(Matrix::Identity(n, n), z);
}

void GpsConfig::validate() const {
  if (!(initial_mesh_size > 0.0)) throw DomainError("initial_mesh_size must be positive");
  if (!is_power_of_two(expansion_factor) || expansion_factor < 1.0) {
    throw DomainError("expansion_factor must be a power of two >= 1");
  }
  if (!is_power_of_two(contraction_factor) || contraction_factor >= 1.0) {
    throw DomainError("contraction_factor must be a power of two < 1");
  }
  if (!(mesh_size_tolerance > 0.0)) throw DomainError("mesh_size_tolerance must be positive");
  if (max_iterations < 0) throw DomainError("max_iterations must be non-negative");
  if (!is_power_of_two(search_points_count)) {
    throw DomainError("search_points_count must be a power of two");
  }
  if (search_radius < 1) throw DomainError("search_radius must be at least 1");
  fixed_point_format.validate();
}

Vector mesh_point(const MeshState& state, const PatternBasis& basis, const IntVector& z) {
  if (static_cast<std::size_t>(z.size()) != basis.size()) {
    throw DimensionMismatchError("z has " + std::to_string(z.size()) + " entries, basis has " +
                                 std::to_string(basis.size()) + " directions");
  }
  if (z.size() > 0 && z.minCoeff() < 0) throw DomainError("mesh coordinates must be non-negative");
  return state.iterate + state.mesh_size * (basis.directions() * z.cast<double>());
}

std::vector<Vector> poll_set(const MeshState& state, const Matrix& directions) {
  if (directions.rows() != state.iterate.size()) {
    throw DimensionMismatchError("poll directions do not match the iterate dimension");
  }
  if (!positive_spanning_check(directions)) {
    throw NotPositiveSpanningError("poll directions do not positively span R^n");
  }
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(directions.cols()));
  for (Eigen::Index j = 0; j < directions.cols(); ++j) {
    out.push_back(state.iterate + state.mesh_size * directions.col(j));
  }
  return out;
}

PollResult poll_step(const MeshState& state, const PatternBasis& basis, const Objective& objective,
                     OracleLedger& ledger, std::vector<Vector>* evaluated) {
  const Matrix& d = basis.directions();
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    Vector y = state.iterate + state.mesh_size * d.col(j);
    const double value = objective(y);
    ++ledger.classical_calls;
    if (evaluated) evaluated->push_back(y);
    if (value < state.incumbent_value) return ImprovedPoint{std::move(y), value};
  }
  return MeshLocalOptimizer{};
}

Rng search_point_rng(std::uint64_t seed, std::int64_t iteration) {
  return Rng(mix(mix(seed) ^ static_cast<std::uint64_t>(iteration)));
}

SearchPoints select_search_points(const MeshState& state, const PatternBasis& basis,
                                  const GpsConfig& config, Rng& rng) {
  const std::size_t wanted = config.search_points_count;
  if (!is_power_of_two(wanted)) throw DomainError("search_points_count must be a power of two");
  if (static_cast<std::size_t>(state.iterate.size()) != basis.dimension()) {
    throw DimensionMismatchError("iterate dimension does not match the pattern basis");
  }
  const FixedPointFormat& fmt = config.fixed_point_format;
  const int zmax = config.search_radius;
  const auto p = static_cast<Eigen::Index>(basis.size());

  SearchPoints out;
  std::unordered_set<BitString> seen;
  try {
    seen.insert(encode_point(std::span(state.iterate.data(), static_cast<std::size_t>(state.iterate.size())), fmt));
  } catch (const OverflowError& e) {
    throw EncodingError(std::string("current iterate is not encodable: ") + e.what());
  }

  IntVector z(p);
  auto consider = [&]() {
    Vector y = mesh_point(state, basis, z);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scaled = std::ldexp(y(i), fmt.frac_bits);
      if (scaled != std::floor(scaled)) {
        throw EncodingError("mesh point coordinate " + std::to_string(y(i)) +
                            " is not a multiple of 2^-" + std::to_string(fmt.frac_bits));
      }
      if (!is_representable(y(i), fmt)) return;  // outside the encodable range
    }
    BitString bits = encode_point(std::span(y.data(), static_cast<std::size_t>(y.size())), fmt);
    if (seen.insert(bits).second) {
      out.points.push_back(std::move(y));
      out.encoded.push_back(std::move(bits));
    }
  };

  std::uniform_int_distribution<int> draw(0, zmax);
  const std::size_t attempts = std::max<std::size_t>(64, 8 * wanted);
  for (std::size_t a = 0; a < attempts && out.points.size() < wanted; ++a) {
    for (Eigen::Index i = 0; i < p; ++i) z(i) = draw(rng);
    if (z.isZero()) continue;
    consider();
  }

  if (out.points.size() < wanted) {
    std::vector<int> zv(static_cast<std::size_t>(p));
    for (int total = 1; total <= static_cast<int>(p) * zmax && out.points.size() < wanted; ++total) {
      for_each_with_sum(zv, 0, total, zmax, [&](const std::vector<int>& v) {
        for (Eigen::Index i = 0; i < p; ++i) z(i) = v[static_cast<std::size_t>(i)];
        consider();
        return out.points.size() < wanted;
      });
    }
  }

  if (out.points.size() < wanted) {
    throw MeshExhaustedError("only " + std::to_string(out.points.size()) +
                             " distinct representable mesh points within radius " +
                             std::to_string(zmax) + ", need " + std::to_string(wanted));
  }
  return out;
}

MeshState update_mesh(const MeshState& state, const StepOutcome& outcome, const GpsConfig& config) {
  MeshState next = state;
  next.iteration = state.iteration + 1;
  if (const auto* improved = std::get_if<ImprovedPoint>(&outcome)) {
    next.iterate = improved->point;
    next.incumbent_value = improved->value;
    next.mesh_size = state.mesh_size * config.expansion_factor;
  } else {
    next.mesh_size = state.mesh_size * config.contraction_factor;
  }
  return next;
}

SearchResult classical_search_step(const std::vector<Vector>& points, const Objective& objective,
                                   double incumbent_value, OracleLedger& ledger) {
  for (const auto& y : points) {
    const double value = objective(y);
    ++ledger.classical_calls;
    if (value < incumbent_value) return ImprovedPoint{y, value};
  }
  return SearchFailure{};
}

SearchBackend classical_backend(const PatternBasis& basis, const GpsConfig& config,
                                const Objective& objective) {
  return [basis, config, objective](const MeshState& state, OracleLedger& ledger,
                                    std::vector<Vector>& candidates) -> SearchResult {
    Rng rng = search_point_rng(config.rng_seed, state.iteration);
    SearchPoints x = select_search_points(state, basis, config, rng);
    // Only the evaluated prefix counts as candidates.
    const std::uint64_t before = ledger.classical_calls;
    SearchResult result = classical_search_step(x.points, objective, state.incumbent_value, ledger);
    const auto used = static_cast<std::size_t>(ledger.classical_calls - before);
    candidates.insert(candidates.end(), x.points.begin(), x.points.begin() + static_cast<std::ptrdiff_t>(used));
    return result;
  };
}

std::string_view to_string(IterationOutcome outcome) {
  switch (outcome) {
    case IterationOutcome::kSearchSuccess: return "search-success";
    case IterationOutcome::kPollSuccess: return "poll-success";
    case IterationOutcome::kMeshLocalOptimizer: return "mesh-local-optimizer";
  }
  return "unknown";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::kMeshTolerance: return "mesh-tolerance";
    case Termination::kIterationCap: return "iteration-cap";
    case Termination::kBudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

GpsResult gps_run(const Objective& objective, const PatternBasis& basis, const Vector& initial_point,
                  const GpsConfig& config, const SearchBackend& search, const IterationSink& sink) {
  config.validate();
  if (static_cast<std::size_t>(initial_point.size()) != basis.dimension()) {
    throw DimensionMismatchError("initial point dimension does not match the pattern basis");
  }
  for (Eigen::Index i = 0; i < initial_point.size(); ++i) {
    if (!is_representable(initial_point(i), config.fixed_point_format)) {
      throw EncodingError("initial point coordinate " + std::to_string(i) +
                          " is not representable in the fixed-point format");
    }
  }

  GpsResult result;
  MeshState state;
  state.iterate = initial_point;
  state.mesh_size = config.initial_mesh_size;
  state.incumbent_value = objective(initial_point);
  ++result.ledger.classical_calls;

  while (true) {
    if (state.mesh_size < config.mesh_size_tolerance) {
      result.termination = Termination::kMeshTolerance;
      break;
    }
    if (state.iteration >= config.max_iterations) {
      result.termination = Termination::kIterationCap;
      break;
    }
    if (config.oracle_budget > 0 && result.ledger.total_calls() >= config.oracle_budget) {
      result.termination = Termination::kBudgetExhausted;
      break;
    }

    IterationRecord record;
    record.iteration = state.iteration;
    record.iterate = state.iterate;
    record.value = state.incumbent_value;
    record.mesh_size = state.mesh_size;

    StepOutcome step = MeshLocalOptimizer{};
    SearchResult searched = search(state, result.ledger, record.candidates);
    record.search_ledger_snapshot = result.ledger;
    if (auto* improved = std::get_if<ImprovedPoint>(&searched)) {
      record.outcome = IterationOutcome::kSearchSuccess;
      step = std::move(*improved);
    } else {
      PollResult polled = poll_step(state, basis, objective, result.ledger, &record.candidates);
      if (auto* p = std::get_if<ImprovedPoint>(&polled)) {
        record.outcome = IterationOutcome::kPollSuccess;
        step = std::move(*p);
      } else {
        record.outcome = IterationOutcome::kMeshLocalOptimizer;
      }
    }
    record.ledger_snapshot = result.ledger;
    state = update_mesh(state, step, config);
    if (sink) sink(record);
    result.trace.push_back(std::move(record));
  }
  result.final_state = state;
  return result;
}

}  // namespace qgps
