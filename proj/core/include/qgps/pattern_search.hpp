#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qgps/bit_string.hpp"
#include "qgps/fixed_point.hpp"
#include "qgps/ledger.hpp"
#include "qgps/sparse_state.hpp"

namespace qgps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;
using IntMatrix = Eigen::MatrixXi;

using Objective = std::function<double(const Vector&)>;

// True iff every vector of R^n is a non-negative combination of the columns.
// Probes +-e_i and a few fixed random directions; each probe is decided by
// basis enumeration for n <= 3 and by non-negative least squares above.
bool positive_spanning_check(const Matrix& directions);

// D = G Z with G nonsingular and Z integer; D must positively span R^n.
class PatternBasis {
 public:
  PatternBasis(Matrix generating, IntMatrix integer_directions);

  // G = I, Z = [I, -I].
  static PatternBasis coordinate(std::size_t dimension);

  const Matrix& generating() const noexcept { return generating_; }
  const IntMatrix& integer_directions() const noexcept { return integer_directions_; }
  const Matrix& directions() const noexcept { return directions_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(directions_.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(directions_.cols()); }

 private:
  Matrix generating_;
  IntMatrix integer_directions_;
  Matrix directions_;
};

struct MeshState {
  Vector iterate;
  double mesh_size = 1.0;
  double incumbent_value = 0.0;
  std::int64_t iteration = 0;
};

struct GpsConfig {
  double initial_mesh_size = 1.0;
  double expansion_factor = 1.0;    // power of two, >= 1
  double contraction_factor = 0.5;  // power of two, < 1
  double mesh_size_tolerance = 0x1p-10;
  std::int64_t max_iterations = 200;
  std::uint64_t oracle_budget = 0;  // total calls; 0 disables
  std::size_t search_points_count = 16;  // N, power of two
  int search_radius = 8;                 // z_max
  FixedPointFormat fixed_point_format{32, 16};
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct ImprovedPoint {
  Vector point;
  double value = 0.0;
};
struct MeshLocalOptimizer {};
struct SearchFailure {};

using PollResult = std::variant<ImprovedPoint, MeshLocalOptimizer>;
using SearchResult = std::variant<ImprovedPoint, SearchFailure>;

// x_k + Delta_k D z for z in N^p.
Vector mesh_point(const MeshState& state, const PatternBasis& basis, const IntVector& z);

// { x_k + Delta_k d : d column of `directions` }, in column order. Throws
// NotPositiveSpanningError when the columns do not positively span.
std::vector<Vector> poll_set(const MeshState& state, const Matrix& directions);

// Opportunistic poll over all columns of D: the first strictly improving
// point wins. One classical call per evaluation. Evaluated points are
// appended to `evaluated` when given.
PollResult poll_step(const MeshState& state, const PatternBasis& basis, const Objective& objective,
                     OracleLedger& ledger, std::vector<Vector>* evaluated = nullptr);

struct SearchPoints {
  std::vector<Vector> points;
  std::vector<BitString> encoded;
};

// Generator for the search-point draw of one iteration. Independent of any
// quantum randomness so both backends see the same points.
Rng search_point_rng(std::uint64_t seed, std::int64_t iteration);

// N distinct representable mesh points x_k + Delta_k D z, z != 0, excluding
// x_k. z is drawn uniformly from {0..z_max}^p; collisions are topped up from
// the smallest z by L1 norm. Candidates outside the encodable range are
// skipped. Throws EncodingError for an off-grid candidate and
// MeshExhaustedError when fewer than N distinct points exist.
SearchPoints select_search_points(const MeshState& state, const PatternBasis& basis,
                                  const GpsConfig& config, Rng& rng);

using StepOutcome = std::variant<ImprovedPoint, MeshLocalOptimizer>;

MeshState update_mesh(const MeshState& state, const StepOutcome& outcome, const GpsConfig& config);

// Baseline: evaluate in order, stop at the first strict improvement.
SearchResult classical_search_step(const std::vector<Vector>& points, const Objective& objective,
                                   double incumbent_value, OracleLedger& ledger);

// A search step as seen by the GPS loop. Implementations append every point
// they evaluate (or search over) to `candidates`.
using SearchBackend =
    std::function<SearchResult(const MeshState&, OracleLedger&, std::vector<Vector>& candidates)>;

SearchBackend classical_backend(const PatternBasis& basis, const GpsConfig& config,
                                const Objective& objective);

enum class IterationOutcome { kSearchSuccess, kPollSuccess, kMeshLocalOptimizer };
enum class Termination { kMeshTolerance, kIterationCap, kBudgetExhausted };

std::string_view to_string(IterationOutcome outcome);
std::string_view to_string(Termination termination);

// State at the start of iteration k, what iteration k did, and the ledger
// after it.
struct IterationRecord {
  std::int64_t iteration = 0;
  Vector iterate;
  double value = 0.0;
  double mesh_size = 0.0;
  IterationOutcome outcome = IterationOutcome::kMeshLocalOptimizer;
  OracleLedger search_ledger_snapshot;  // after the search step, before any poll
  OracleLedger ledger_snapshot;
  std::vector<Vector> candidates;
};

struct GpsResult {
  std::vector<IterationRecord> trace;
  MeshState final_state;
  OracleLedger ledger;
  Termination termination = Termination::kMeshTolerance;
};

using IterationSink = std::function<void(const IterationRecord&)>;

// Search, then poll on search failure, then update the mesh; stops on
// mesh_size < tolerance, the iteration cap or the oracle budget. The initial
// evaluation of f(x_0) is one classical call.
GpsResult gps_run(const Objective& objective, const PatternBasis& basis, const Vector& initial_point,
                  const GpsConfig& config, const SearchBackend& search,
                  const IterationSink& sink = {});

}  // namespace qgps
