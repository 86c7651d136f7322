#include "qgps/amplification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "qgps/errors.hpp"

namespace qgps {
namespace {

std::uint64_t low_mask(std::size_t bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// ceil(c^l), or throws once it no longer fits comfortably in 63 bits.
std::int64_t schedule_bound(double c, std::int64_t l) {
  const double m = std::ceil(std::pow(c, static_cast<double>(l)));
  if (!(m < 0x1p62)) throw SafetyCapReached("iteration bound ceil(c^l) overflowed at l=" + std::to_string(l));
  return static_cast<std::int64_t>(m);
}

QSearchOutcome run_search(const SearchProblem& problem, const QSearchParams& params,
                          const RoundSink& sink, bool modified) {
  params.validate();
  problem.validate();

  GroverIterate iterate(problem);
  StatePreparation& prep = iterate.preparation();
  Rng rng(params.rng_seed);
  OracleLedger ledger;
  QSearchOutcome outcome;
  const auto n_points = static_cast<std::uint64_t>(problem.points.size());

  auto finish = [&](std::optional<BitString> found, std::int64_t l, std::int64_t u) {
    outcome.found = std::move(found);
    outcome.rounds_executed = l;
    outcome.u_rounds = u;
    outcome.q_applications = ledger.q_applications;
    outcome.ledger_delta = ledger;
    return outcome;
  };

  // Round 0: prepare and measure once.
  {
    SparseState state = iterate.prepare(ledger);
    BitString measured = measure(state, rng);
    const bool desired = prep.is_desired(measured);
    if (sink) sink({0, 0, 0, 0, measured, desired});
    if (desired) return finish(std::move(measured), 0, 0);
  }

  const double threshold = params.stopping_threshold();
  std::int64_t l = 0;
  std::int64_t u = 0;
  while (!modified || static_cast<double>(u) < threshold) {
    if (!modified && l >= params.max_total_rounds) {
      throw SafetyCapReached("qsearch exceeded " + std::to_string(params.max_total_rounds) +
                             " rounds without a desired measurement");
    }
    ++l;
    const std::int64_t m = schedule_bound(params.c, l);
    if (modified) {
      // M > sqrt(N) in integers: M^2 > N  <=>  M > floor(N / M).
      if (static_cast<std::uint64_t>(m) > n_points / static_cast<std::uint64_t>(m)) ++u;
    }
    ++ledger.qsearch_rounds;

    SparseState state = iterate.prepare(ledger);
    std::uniform_int_distribution<std::int64_t> pick(1, m);
    const std::int64_t j = pick(rng);
    for (std::int64_t i = 0; i < j; ++i) iterate.apply(state, ledger);

    BitString measured = measure(state, rng);
    const bool desired = prep.is_desired(measured);
    if (sink) sink({l, m, j, u, measured, desired});
    if (desired) return finish(std::move(measured), l, u);
  }
  return finish(std::nullopt, l, u);
}

}  // namespace

void QSearchParams::validate() const {
  if (!(c > 1.0 && c < 2.0)) throw DomainError("c must lie in (1, 2), got " + std::to_string(c));
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("tau must lie in (0, 1), got " + std::to_string(tau));
  }
  if (max_total_rounds < 0) throw DomainError("max_total_rounds must be non-negative");
}

double QSearchParams::stopping_threshold() const { return std::log(tau) / std::log(0.75); }

void SearchProblem::validate() const {
  layout.validate();
  if (points.empty()) throw EmptyTargetsError("search problem has no points");
  std::set<BitString> seen;
  for (const auto& p : points) {
    if (p.width() != layout.point_bits) {
      throw WidthMismatchError("point width " + std::to_string(p.width()) +
                               " does not match point register " + std::to_string(layout.point_bits));
    }
    if (!seen.insert(p).second) throw DomainError("duplicate search point " + p.to_string());
  }
  if (incumbent_value_bits.width() != layout.value_bits) {
    throw WidthMismatchError("incumbent value width does not match the value register");
  }
  if (!oracle) throw DomainError("search problem has no oracle");
}

// ---------------------------------------------------------------------------
// StatePreparation

StatePreparation::StatePreparation(const SearchProblem& problem)
    : layout_(problem.layout),
      table_(std::make_shared<BasisTable>(problem.layout.total_bits())),
      load_incumbent_([layout = problem.layout,
                       pattern = negate_bits(problem.incumbent_value_bits).to_uint()](const BitString& b) {
        BitString out = b;
        const auto off = layout.comparison_offset();
        out.assign_uint(off, layout.comparison_bits, b.slice_uint(off, layout.comparison_bits) ^ pattern);
        return out;
      }),
      prepare_points_(problem.points, problem.layout.point_offset()),
      oracle_([layout = problem.layout, oracle = problem.oracle](const BitString& b) {
        const BitString value = oracle(b.slice(layout.point_offset(), layout.point_bits));
        if (value.width() != layout.value_bits) {
          throw WidthMismatchError("oracle returned " + std::to_string(value.width()) +
                                   " bits for a " + std::to_string(layout.value_bits) + "-bit register");
        }
        BitString out = b;
        const auto off = layout.value_offset();
        out.assign_uint(off, layout.value_bits, b.slice_uint(off, layout.value_bits) ^ value.to_uint());
        return out;
      }),
      add_value_([layout = problem.layout](const BitString& b) {
        BitString out = b;
        const auto v = b.slice_uint(layout.value_offset(), layout.value_bits);
        const auto c = b.slice_uint(layout.comparison_offset(), layout.comparison_bits);
        out.assign_uint(layout.comparison_offset(), layout.comparison_bits,
                        (c + v) & low_mask(layout.comparison_bits));
        return out;
      }),
      subtract_value_([layout = problem.layout](const BitString& b) {
        BitString out = b;
        const auto v = b.slice_uint(layout.value_offset(), layout.value_bits);
        const auto c = b.slice_uint(layout.comparison_offset(), layout.comparison_bits);
        out.assign_uint(layout.comparison_offset(), layout.comparison_bits,
                        (c - v) & low_mask(layout.comparison_bits));
        return out;
      }) {
  problem.validate();
}

void StatePreparation::apply(SparseState& state) {
  load_incumbent_.apply(state);
  prepare_points_.apply(state);
  oracle_.apply(state);
  add_value_.apply(state);
}

void StatePreparation::apply_inverse(SparseState& state) {
  subtract_value_.apply(state);
  oracle_.apply(state);
  prepare_points_.apply(state);
  load_incumbent_.apply(state);
}

SparseState StatePreparation::zero_state() const {
  return SparseState::basis(BitString(layout_.total_bits()), table_);
}

bool StatePreparation::is_desired(const BitString& bits) const {
  return bits.bit(layout_.comparison_offset());
}

StatePreparation build_state_preparation(const SearchProblem& problem) {
  return StatePreparation(problem);
}

SparseState apply_zero_reflection(SparseState state) {
  return apply_phase(std::move(state), [](const BitString& b) { return b.all_zero(); }, -1.0);
}

SparseState apply_desired_reflection(SparseState state, const RegisterLayout& layout) {
  const auto sign = layout.comparison_offset();
  return apply_phase(std::move(state), [sign](const BitString& b) { return b.bit(sign); }, -1.0);
}

// ---------------------------------------------------------------------------
// GroverIterate

GroverIterate::GroverIterate(const SearchProblem& problem)
    : prep_(problem),
      zero_reflection_([](const BitString& b) { return b.all_zero(); }, -1.0),
      desired_reflection_(
          [sign = problem.layout.comparison_offset()](const BitString& b) { return b.bit(sign); },
          -1.0) {}

SparseState GroverIterate::prepare(OracleLedger& ledger) {
  ledger.quantum_calls += 1;
  ledger.state_preparations += 1;
  // A is deterministic: compute A|0> once and hand out copies. Every copy is
  // still charged as a fresh preparation.
  if (!prepared_) {
    SparseState s = prep_.zero_state();
    prep_.apply(s);
    prepared_ = std::move(s);
  }
  return *prepared_;
}

void GroverIterate::apply(SparseState& state, OracleLedger& ledger) {
  desired_reflection_.apply(state);
  prep_.apply_inverse(state);
  zero_reflection_.apply(state);
  prep_.apply(state);
  for (auto& a : state.amplitudes()) a = -a;
  ledger.quantum_calls += 2;
  ledger.q_applications += 1;
}

SparseState apply_grover_iterate(SparseState state, GroverIterate& iterate, OracleLedger& ledger) {
  iterate.apply(state, ledger);
  return state;
}

// ---------------------------------------------------------------------------

QSearchOutcome qsearch(const SearchProblem& problem, const QSearchParams& params,
                       const RoundSink& sink) {
  return run_search(problem, params, sink, false);
}

QSearchOutcome modified_qsearch(const SearchProblem& problem, const QSearchParams& params,
                                const RoundSink& sink) {
  return run_search(problem, params, sink, true);
}

std::int64_t modified_qsearch_round_bound(std::size_t n_points, const QSearchParams& params) {
  params.validate();
  const double log_sqrt_n = 0.5 * std::log(static_cast<double>(n_points)) / std::log(params.c);
  return static_cast<std::int64_t>(std::ceil(log_sqrt_n)) +
         static_cast<std::int64_t>(std::ceil(params.stopping_threshold())) + 1;
}

double analytic_success_probability(std::size_t n_points, std::size_t t, std::int64_t j) {
  if (n_points == 0) throw DomainError("N must be at least 1");
  if (t > n_points) throw DomainError("t exceeds N");
  if (j < 0) throw DomainError("j must be non-negative");
  if (t == 0) return 0.0;
  if (t == n_points && j == 0) return 1.0;
  const double theta = std::asin(std::sqrt(static_cast<double>(t) / static_cast<double>(n_points)));
  const double s = std::sin(static_cast<double>(2 * j + 1) * theta);
  return s * s;
}

std::size_t count_desired(const SearchProblem& problem) {
  problem.validate();
  const auto bits = problem.layout.value_bits;
  const auto incumbent = problem.incumbent_value_bits.to_uint();
  std::size_t t = 0;
  for (const auto& p : problem.points) {
    const auto diff = (problem.oracle(p).to_uint() - incumbent) & low_mask(bits);
    if ((diff >> (bits - 1)) & 1U) ++t;
  }
  return t;
}

PlantedProblem make_planted_problem(std::size_t n_points, std::size_t t, std::uint64_t seed) {
  if (n_points == 0) throw DomainError("planted problem needs N >= 1");
  if (t > n_points) throw DomainError("t exceeds N");
  // Wide enough to hold raw point indices 0..N-1 and the values -1, 0, +1.
  std::size_t width = 4;
  while ((std::uint64_t{1} << (width - 1)) < n_points) ++width;
  if (width > 32) throw DomainError("planted problem too large");
  FixedPointFormat fmt{static_cast<int>(width), 0};
  const RegisterLayout layout = RegisterLayout::for_points(1, fmt);

  std::vector<std::size_t> order(n_points);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> improving(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t));
  std::sort(improving.begin(), improving.end());

  PlantedProblem planted;
  planted.improving = improving;
  auto marked = std::make_shared<std::set<std::uint64_t>>(improving.begin(), improving.end());
  for (std::size_t i = 0; i < n_points; ++i) {
    planted.problem.points.push_back(BitString::from_uint(i, layout.point_bits));
  }
  planted.problem.incumbent_value_bits = encode_raw(0, fmt);
  planted.problem.layout = layout;
  planted.problem.oracle = [marked, fmt, n_points](const BitString& point) {
    const auto index = point.to_uint();
    const bool improves = index < n_points && marked->count(index) > 0;
    return encode_raw(improves ? -1 : 1, fmt);
  };
  return planted;
}

}  // namespace qgps
