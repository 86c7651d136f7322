#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qgps/bit_string.hpp"
#include "qgps/fixed_point.hpp"
#include "qgps/ledger.hpp"
#include "qgps/sparse_state.hpp"

namespace qgps {

struct QSearchParams {
  double c = 1.5;                          // schedule growth, 1 < c < 2
  double tau = 0.01;                       // tolerated miss probability, 0 < tau < 1
  std::uint64_t rng_seed = 0;
  std::int64_t max_total_rounds = 10'000;  // only bounds the unmodified search

  void validate() const;
  // ln(tau) / ln(3/4): the loop of the modified search runs while u is below it.
  double stopping_threshold() const;
};

// One improvement query: a set of candidate points on the point register,
// the encoded incumbent value, and the classical oracle that the quantum
// oracle lifts (point bits -> value bits).
struct SearchProblem {
  std::vector<BitString> points;
  BitString incumbent_value_bits;
  std::function<BitString(const BitString&)> oracle;
  RegisterLayout layout;

  void validate() const;
};

// Unitary that maps |0>|0>|0> to N^-1/2 sum_j |x_j>|f_j>|f_j - f_k>. Built as
//   1. XOR the comparison register with the encoding of -f_k,
//   2. Householder preparation of the point register,
//   3. oracle |x>|v> -> |x>|v xor f(x)>,
//   4. comparison += value (mod 2^d).
// Sub-operators cache their action per basis id, so one instance should
// serve all rounds of a search.
class StatePreparation {
 public:
  explicit StatePreparation(const SearchProblem& problem);

  void apply(SparseState& state);
  void apply_inverse(SparseState& state);

  // |0...0> on the table shared by every state of this problem.
  SparseState zero_state() const;
  const RegisterLayout& layout() const noexcept { return layout_; }
  // Sign bit of the comparison register.
  bool is_desired(const BitString& bits) const;

 private:
  RegisterLayout layout_;
  std::shared_ptr<BasisTable> table_;
  BasisMap load_incumbent_;
  HouseholderPrepare prepare_points_;
  BasisMap oracle_;
  BasisMap add_value_;
  BasisMap subtract_value_;
};

StatePreparation build_state_preparation(const SearchProblem& problem);

// Phase -1 on |0...0>, identity elsewhere.
SparseState apply_zero_reflection(SparseState state);
// Phase -1 on strings whose comparison register is negative.
SparseState apply_desired_reflection(SparseState state, const RegisterLayout& layout);

// The amplification iterate Q = -A S0 A^-1 S_chi over one problem, with
// cached reflections. Each application adds two quantum oracle calls.
class GroverIterate {
 public:
  explicit GroverIterate(const SearchProblem& problem);

  StatePreparation& preparation() noexcept { return prep_; }

  // A|0>, charged as one quantum call.
  SparseState prepare(OracleLedger& ledger);
  void apply(SparseState& state, OracleLedger& ledger);

 private:
  StatePreparation prep_;
  PhaseOperator zero_reflection_;
  PhaseOperator desired_reflection_;
  std::optional<SparseState> prepared_;
};

SparseState apply_grover_iterate(SparseState state, GroverIterate& iterate, OracleLedger& ledger);

// One body of the search loop; l == 0 is the initial measure-after-prepare.
struct QSearchRound {
  std::int64_t l = 0;
  std::int64_t m = 0;
  std::int64_t j = 0;
  std::int64_t u = 0;
  BitString measured;
  bool desired = false;
};

using RoundSink = std::function<void(const QSearchRound&)>;

struct QSearchOutcome {
  std::optional<BitString> found;  // empty on failure
  std::int64_t rounds_executed = 0;
  std::int64_t u_rounds = 0;
  std::uint64_t q_applications = 0;
  OracleLedger ledger_delta;

  bool failed() const { return !found.has_value(); }
};

// Unbounded schedule. Never fails on its own; throws SafetyCapReached after
// params.max_total_rounds loop rounds (the no-solution case).
QSearchOutcome qsearch(const SearchProblem& problem, const QSearchParams& params,
                       const RoundSink& sink = {});

// Adds the u counter (rounds with M > sqrt(N)) and stops once u reaches
// ln(tau)/ln(3/4), returning failure. Always terminates.
QSearchOutcome modified_qsearch(const SearchProblem& problem, const QSearchParams& params,
                                const RoundSink& sink = {});

// Upper bound on loop rounds of modified_qsearch:
// ceil(log_c sqrt(N)) + ceil(ln tau / ln 3/4) + 1.
std::int64_t modified_qsearch_round_bound(std::size_t n_points, const QSearchParams& params);

// sin^2((2j+1) asin(sqrt(t/N))). Throws DomainError unless 0 <= t <= N, N >= 1.
double analytic_success_probability(std::size_t n_points, std::size_t t, std::int64_t j);

// Number of points whose oracle value is below the incumbent in d-bit
// two's-complement, i.e. the desired count of the prepared state.
std::size_t count_desired(const SearchProblem& problem);

// Synthetic problem on a one-dimensional point register: N distinct points,
// `t` of them (chosen by the seed) with value -1 against an incumbent of 0,
// the rest +1.
struct PlantedProblem {
  SearchProblem problem;
  std::vector<std::size_t> improving;  // indices into problem.points
};

PlantedProblem make_planted_problem(std::size_t n_points, std::size_t t, std::uint64_t seed);

}  // namespace qgps
