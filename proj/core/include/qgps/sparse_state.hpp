#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qgps/bit_string.hpp"
#include "qgps/fixed_point.hpp"

namespace qgps {

using Amplitude = std::complex<double>;
using Rng = std::mt19937_64;

// Amplitudes below this magnitude are dropped after every operator.
inline constexpr double kPruneThreshold = 1e-12;
// measure() refuses states whose squared norm is further than this from 1.
inline constexpr double kMeasureNormTolerance = 1e-6;

// Point, value and comparison registers, contiguous and in that order.
struct RegisterLayout {
  std::size_t point_bits = 0;
  std::size_t value_bits = 0;
  std::size_t comparison_bits = 0;

  static RegisterLayout for_points(std::size_t dimension, const FixedPointFormat& fmt);

  std::size_t total_bits() const { return point_bits + value_bits + comparison_bits; }
  std::size_t point_offset() const { return 0; }
  std::size_t value_offset() const { return point_bits; }
  std::size_t comparison_offset() const { return point_bits + value_bits; }

  void validate() const;
};

// Interns basis strings of one width to dense ids. States built on the same
// table can share operator caches; a table is not safe for concurrent use.
class BasisTable {
 public:
  explicit BasisTable(std::size_t width);

  std::size_t width() const noexcept { return width_; }
  // Process-unique, never reused; operator caches key on it (an address can
  // be recycled once a table dies).
  std::uint64_t serial() const noexcept { return serial_; }
  std::size_t size() const noexcept { return strings_.size(); }

  std::uint32_t intern(const BitString& bits);
  std::optional<std::uint32_t> find(const BitString& bits) const;
  const BitString& at(std::uint32_t id) const { return strings_[id]; }

 private:
  std::size_t width_;
  std::uint64_t serial_;
  std::unordered_map<BitString, std::uint32_t> index_;
  std::vector<BitString> strings_;
};

// Pure state stored as a finite map from basis strings to amplitudes.
//
// Amplitudes live in a vector indexed by the basis-table id; ids that never
// received weight read as zero. Memory therefore tracks the number of basis
// strings the computation has touched, not 2^width.
class SparseState {
 public:
  // |0...0> on a fresh table.
  explicit SparseState(std::size_t width);

  static SparseState basis(const BitString& bits, std::shared_ptr<BasisTable> table = nullptr);
  // Amplitudes are taken as given (no normalization); duplicate strings
  // accumulate.
  static SparseState from_entries(std::size_t width,
                                  const std::vector<std::pair<BitString, Amplitude>>& entries,
                                  std::shared_ptr<BasisTable> table = nullptr);

  std::size_t width() const noexcept { return table_->width(); }
  const std::shared_ptr<BasisTable>& table() const noexcept { return table_; }

  Amplitude amplitude(const BitString& bits) const;
  // Nonzero entries ordered by bit string.
  std::vector<std::pair<BitString, Amplitude>> entries() const;
  std::size_t support_size() const;
  double norm_squared() const;
  // Total |amplitude|^2 over strings satisfying the predicate.
  double probability(const std::function<bool(const BitString&)>& predicate) const;

  // Raw access for operator implementations. Indices follow table ids; the
  // vector may be shorter than the table.
  std::vector<Amplitude>& amplitudes() noexcept { return amps_; }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amps_; }

  void prune(double threshold = kPruneThreshold);

 private:
  explicit SparseState(std::shared_ptr<BasisTable> table) : table_(std::move(table)) {}

  std::shared_ptr<BasisTable> table_;
  std::vector<Amplitude> amps_;
};

// Max-norm distance between two states, aligned by bit string.
double max_amplitude_distance(const SparseState& a, const SparseState& b);

// Permutation of basis strings given by a classical function. Images are
// cached per table id, so repeated application costs one pass over the
// support.
class BasisMap {
 public:
  using Function = std::function<BitString(const BitString&)>;

  explicit BasisMap(Function map) : map_(std::move(map)) {}

  // Throws CollisionError if two supported strings share an image.
  void apply(SparseState& state);

 private:
  std::int64_t image_of(BasisTable& table, std::uint32_t id);

  Function map_;
  std::uint64_t cached_for_ = 0;
  std::vector<std::int64_t> image_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

// Multiplies the amplitude of every marked string by a unit phase.
class PhaseOperator {
 public:
  using Predicate = std::function<bool(const BitString&)>;

  PhaseOperator(Predicate marked, Amplitude phase);

  void apply(SparseState& state);

 private:
  Predicate marked_;
  Amplitude phase_;
  std::uint64_t cached_for_ = 0;
  std::vector<std::int8_t> is_marked_;
};

// Reflection I - 2|w><w| on one register, with |w> proportional to
// |psi> - |0...0> and |psi> the uniform superposition of the targets. It is
// self-inverse and sends |0...0> to |psi> (identity when |psi> = |0...0>).
class HouseholderPrepare {
 public:
  HouseholderPrepare(std::vector<BitString> targets, std::size_t register_offset = 0);

  void apply(SparseState& state);

  std::size_t register_width() const noexcept { return register_width_; }
  std::size_t register_offset() const noexcept { return register_offset_; }
  const std::vector<BitString>& targets() const noexcept { return targets_; }

 private:
  struct Slot {
    std::int32_t point = -1;  // index into w_points_, -1 when outside supp(w)
    std::uint32_t rest = 0;   // id of the string with the register cleared
  };

  void reset_cache(const BasisTable& table);
  const Slot& slot_of(const BasisTable& table, std::uint32_t id);
  std::uint32_t compose(BasisTable& table, std::uint32_t rest, std::size_t point);

  std::vector<BitString> targets_;
  std::size_t register_offset_;
  std::size_t register_width_ = 0;
  bool identity_ = false;
  std::vector<BitString> w_points_;
  std::vector<double> w_coeffs_;
  std::unordered_map<BitString, std::int32_t> w_index_;

  std::uint64_t cached_for_ = 0;
  std::vector<std::optional<Slot>> slots_;
  std::unordered_map<BitString, std::uint32_t> rest_index_;
  std::vector<BitString> rests_;
  std::vector<std::vector<std::int64_t>> composed_;
};

// Value-returning forms of the operators above.
SparseState apply_basis_map(SparseState state, const BasisMap::Function& map);
SparseState apply_phase(SparseState state, const PhaseOperator::Predicate& marked,
                        Amplitude phase);
// Throws EmptyTargetsError for an empty target set.
HouseholderPrepare householder_prepare(std::vector<BitString> targets,
                                       std::size_t register_offset = 0);

// Born-rule sample. The generator alone determines the draw. Throws
// NormalizationError if the squared norm is off by more than 1e-6.
BitString measure(const SparseState& state, Rng& rng);

// Repeated Born-rule draws from one fixed state (binary search over the
// cumulative distribution). Produces the same outcome as measure() for the
// same generator state.
class BornSampler {
 public:
  explicit BornSampler(const SparseState& state);

  BitString draw(Rng& rng) const;

 private:
  std::shared_ptr<BasisTable> table_;
  std::vector<std::uint32_t> ids_;
  std::vector<double> cumulative_;
};

}  // namespace qgps
