#include "qgps/sparse_state.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <string>

#include "qgps/errors.hpp"

namespace qgps {

RegisterLayout RegisterLayout::for_points(std::size_t dimension, const FixedPointFormat& fmt) {
  fmt.validate();
  const auto d = static_cast<std::size_t>(fmt.total_bits);
  RegisterLayout layout{dimension * d, d, d};
  layout.validate();
  return layout;
}

void RegisterLayout::validate() const {
  if (point_bits == 0 || value_bits == 0 || comparison_bits == 0) {
    throw DimensionMismatchError("register widths must all be positive");
  }
  if (value_bits != comparison_bits) {
    throw DimensionMismatchError("value and comparison registers must have equal width");
  }
  if (value_bits > 64) throw DimensionMismatchError("value register wider than 64 bits");
}

// ---------------------------------------------------------------------------
// BasisTable

BasisTable::BasisTable(std::size_t width) : width_(width) {
  static std::atomic<std::uint64_t> next{1};
  serial_ = next.fetch_add(1, std::memory_order_relaxed);
}

std::uint32_t BasisTable::intern(const BitString& bits) {
  if (bits.width() != width_) {
    throw WidthMismatchError("basis string width " + std::to_string(bits.width()) +
                             " does not match state width " + std::to_string(width_));
  }
  auto [it, inserted] = index_.try_emplace(bits, static_cast<std::uint32_t>(strings_.size()));
  if (inserted) strings_.push_back(bits);
  return it->second;
}

std::optional<std::uint32_t> BasisTable::find(const BitString& bits) const {
  auto it = index_.find(bits);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// SparseState

SparseState::SparseState(std::size_t width) : table_(std::make_shared<BasisTable>(width)) {
  const auto id = table_->intern(BitString(width));
  amps_.assign(id + 1, Amplitude{});
  amps_[id] = 1.0;
}

SparseState SparseState::basis(const BitString& bits, std::shared_ptr<BasisTable> table) {
  if (!table) table = std::make_shared<BasisTable>(bits.width());
  SparseState s(std::move(table));
  const auto id = s.table_->intern(bits);
  s.amps_.assign(s.table_->size(), Amplitude{});
  s.amps_[id] = 1.0;
  return s;
}

SparseState SparseState::from_entries(std::size_t width,
                                      const std::vector<std::pair<BitString, Amplitude>>& entries,
                                      std::shared_ptr<BasisTable> table) {
  if (!table) table = std::make_shared<BasisTable>(width);
  if (table->width() != width) throw WidthMismatchError("table width differs from state width");
  SparseState s(std::move(table));
  for (const auto& [bits, amp] : entries) {
    const auto id = s.table_->intern(bits);
    if (s.amps_.size() <= id) s.amps_.resize(id + 1);
    s.amps_[id] += amp;
  }
  s.prune();
  return s;
}

Amplitude SparseState::amplitude(const BitString& bits) const {
  auto id = table_->find(bits);
  if (!id || *id >= amps_.size()) return {};
  return amps_[*id];
}

std::vector<std::pair<BitString, Amplitude>> SparseState::entries() const {
  std::vector<std::pair<BitString, Amplitude>> out;
  for (std::size_t id = 0; id < amps_.size(); ++id) {
    if (amps_[id] != Amplitude{}) out.emplace_back(table_->at(static_cast<std::uint32_t>(id)), amps_[id]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::size_t SparseState::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(amps_.begin(), amps_.end(), [](const Amplitude& a) { return a != Amplitude{}; }));
}

double SparseState::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return total;
}

double SparseState::probability(const std::function<bool(const BitString&)>& predicate) const {
  double total = 0.0;
  for (std::size_t id = 0; id < amps_.size(); ++id) {
    if (amps_[id] != Amplitude{} && predicate(table_->at(static_cast<std::uint32_t>(id)))) {
      total += std::norm(amps_[id]);
    }
  }
  return total;
}

void SparseState::prune(double threshold) {
  for (auto& a : amps_) {
    if (std::abs(a) < threshold) a = Amplitude{};
  }
}

double max_amplitude_distance(const SparseState& a, const SparseState& b) {
  double worst = 0.0;
  for (const auto& [bits, amp] : a.entries()) worst = std::max(worst, std::abs(amp - b.amplitude(bits)));
  for (const auto& [bits, amp] : b.entries()) worst = std::max(worst, std::abs(amp - a.amplitude(bits)));
  return worst;
}

// ---------------------------------------------------------------------------
// BasisMap

std::int64_t BasisMap::image_of(BasisTable& table, std::uint32_t id) {
  if (image_.size() <= id) image_.resize(table.size(), -1);
  if (image_[id] < 0) {
    const BitString& source = table.at(id);
    const BitString target = map_(source);
    image_[id] = table.intern(target);
  }
  return image_[id];
}

void BasisMap::apply(SparseState& state) {
  BasisTable& table = *state.table();
  if (cached_for_ != table.serial()) {
    cached_for_ = table.serial();
    image_.clear();
  }
  auto& amps = state.amplitudes();
  // Resolve every image first: interning may grow the table.
  for (std::size_t id = 0; id < amps.size(); ++id) {
    if (amps[id] != Amplitude{}) image_of(table, static_cast<std::uint32_t>(id));
  }
  std::vector<Amplitude> out(table.size());
  if (stamp_.size() < table.size()) stamp_.resize(table.size(), 0);
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  for (std::size_t id = 0; id < amps.size(); ++id) {
    if (amps[id] == Amplitude{}) continue;
    const auto target = static_cast<std::size_t>(image_[id]);
    if (stamp_[target] == epoch_) {
      throw CollisionError("basis map is not injective: two strings map to " +
                           table.at(static_cast<std::uint32_t>(target)).to_string());
    }
    stamp_[target] = epoch_;
    out[target] = amps[id];
  }
  amps.swap(out);
}

// ---------------------------------------------------------------------------
// PhaseOperator

PhaseOperator::PhaseOperator(Predicate marked, Amplitude phase)
    : marked_(std::move(marked)), phase_(phase) {
  if (std::abs(std::abs(phase) - 1.0) > 1e-12) {
    throw DomainError("phase must have unit modulus");
  }
}

void PhaseOperator::apply(SparseState& state) {
  const BasisTable& table = *state.table();
  if (cached_for_ != table.serial()) {
    cached_for_ = table.serial();
    is_marked_.clear();
  }
  auto& amps = state.amplitudes();
  if (is_marked_.size() < amps.size()) is_marked_.resize(table.size(), -1);
  for (std::size_t id = 0; id < amps.size(); ++id) {
    if (amps[id] == Amplitude{}) continue;
    auto& flag = is_marked_[id];
    if (flag < 0) flag = marked_(table.at(static_cast<std::uint32_t>(id))) ? 1 : 0;
    if (flag == 1) amps[id] *= phase_;
  }
}

// ---------------------------------------------------------------------------
// HouseholderPrepare

HouseholderPrepare::HouseholderPrepare(std::vector<BitString> targets, std::size_t register_offset)
    : targets_(std::move(targets)), register_offset_(register_offset) {
  if (targets_.empty()) throw EmptyTargetsError("state preparation needs at least one target");
  register_width_ = targets_.front().width();
  std::set<BitString> seen;
  for (const auto& t : targets_) {
    if (t.width() != register_width_) throw WidthMismatchError("targets differ in width");
    if (!seen.insert(t).second) throw DomainError("duplicate target " + t.to_string());
  }

  // w = (psi - |0>) / ||psi - |0>||, with psi = N^-1/2 sum |x>.
  const double amp = 1.0 / std::sqrt(static_cast<double>(targets_.size()));
  const BitString zero(register_width_);
  std::vector<std::pair<BitString, double>> w;
  bool zero_is_target = false;
  for (const auto& t : targets_) {
    if (t == zero) {
      zero_is_target = true;
      w.emplace_back(t, amp - 1.0);
    } else {
      w.emplace_back(t, amp);
    }
  }
  if (!zero_is_target) w.emplace_back(zero, -1.0);

  double norm2 = 0.0;
  for (const auto& [bits, c] : w) norm2 += c * c;
  if (norm2 < 1e-24) {
    identity_ = true;
    return;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (const auto& [bits, c] : w) {
    if (c == 0.0) continue;
    w_index_.emplace(bits, static_cast<std::int32_t>(w_points_.size()));
    w_points_.push_back(bits);
    w_coeffs_.push_back(c * inv);
  }
}

void HouseholderPrepare::reset_cache(const BasisTable& table) {
  cached_for_ = table.serial();
  slots_.clear();
  rest_index_.clear();
  rests_.clear();
  composed_.clear();
}

const HouseholderPrepare::Slot& HouseholderPrepare::slot_of(const BasisTable& table,
                                                           std::uint32_t id) {
  if (slots_.size() <= id) slots_.resize(table.size());
  auto& slot = slots_[id];
  if (!slot) {
    const BitString& full = table.at(id);
    const BitString point = full.slice(register_offset_, register_width_);
    BitString rest = full;
    rest.assign(register_offset_, BitString(register_width_));
    Slot s;
    if (auto it = w_index_.find(point); it != w_index_.end()) s.point = it->second;
    auto [rit, inserted] = rest_index_.try_emplace(rest, static_cast<std::uint32_t>(rests_.size()));
    if (inserted) {
      rests_.push_back(rest);
      composed_.emplace_back(w_points_.size(), -1);
    }
    s.rest = rit->second;
    slot = s;
  }
  return *slot;
}

std::uint32_t HouseholderPrepare::compose(BasisTable& table, std::uint32_t rest, std::size_t point) {
  auto& cached = composed_[rest][point];
  if (cached < 0) {
    BitString full = rests_[rest];
    full.assign(register_offset_, w_points_[point]);
    cached = table.intern(full);
  }
  return static_cast<std::uint32_t>(cached);
}

void HouseholderPrepare::apply(SparseState& state) {
  if (state.width() < register_offset_ + register_width_) {
    throw WidthMismatchError("state too narrow for the prepared register");
  }
  if (identity_) return;
  BasisTable& table = *state.table();
  if (cached_for_ != table.serial()) reset_cache(table);

  // <w|v_r> for every assignment r of the other registers.
  auto& amps = state.amplitudes();
  std::vector<Amplitude> overlap;
  for (std::size_t id = 0; id < amps.size(); ++id) {
    if (amps[id] == Amplitude{}) continue;
    const Slot& s = slot_of(table, static_cast<std::uint32_t>(id));
    if (s.point < 0) continue;
    if (overlap.size() <= s.rest) overlap.resize(rests_.size());
    overlap[s.rest] += w_coeffs_[static_cast<std::size_t>(s.point)] * amps[id];
  }

  std::vector<std::pair<std::uint32_t, Amplitude>> updates;
  for (std::uint32_t r = 0; r < overlap.size(); ++r) {
    if (overlap[r] == Amplitude{}) continue;
    for (std::size_t k = 0; k < w_points_.size(); ++k) {
      updates.emplace_back(compose(table, r, k), -2.0 * w_coeffs_[k] * overlap[r]);
    }
  }
  if (amps.size() < table.size()) amps.resize(table.size());
  for (const auto& [id, delta] : updates) amps[id] += delta;
  state.prune();
}

// ---------------------------------------------------------------------------

SparseState apply_basis_map(SparseState state, const BasisMap::Function& map) {
  BasisMap op(map);
  op.apply(state);
  return state;
}

SparseState apply_phase(SparseState state, const PhaseOperator::Predicate& marked,
                        Amplitude phase) {
  PhaseOperator op(marked, phase);
  op.apply(state);
  return state;
}

HouseholderPrepare householder_prepare(std::vector<BitString> targets,
                                       std::size_t register_offset) {
  return HouseholderPrepare(std::move(targets), register_offset);
}

BitString measure(const SparseState& state, Rng& rng) {
  const double norm2 = state.norm_squared();
  if (std::abs(norm2 - 1.0) > kMeasureNormTolerance) {
    throw NormalizationError("cannot measure: squared norm is " + std::to_string(norm2));
  }
  std::uniform_real_distribution<double> uniform(0.0, norm2);
  const double u = uniform(rng);
  const auto& amps = state.amplitudes();
  double cumulative = 0.0;
  std::size_t last = amps.size();
  for (std::size_t id = 0; id < amps.size(); ++id) {
    if (amps[id] == Amplitude{}) continue;
    cumulative += std::norm(amps[id]);
    last = id;
    if (u < cumulative) break;
  }
  return state.table()->at(static_cast<std::uint32_t>(last));
}

BornSampler::BornSampler(const SparseState& state) : table_(state.table()) {
  const double norm2 = state.norm_squared();
  if (std::abs(norm2 - 1.0) > kMeasureNormTolerance) {
    throw NormalizationError("cannot measure: squared norm is " + std::to_string(norm2));
  }
  const auto& amps = state.amplitudes();
  double cumulative = 0.0;
  for (std::size_t id = 0; id < amps.size(); ++id) {
    if (amps[id] == Amplitude{}) continue;
    cumulative += std::norm(amps[id]);
    ids_.push_back(static_cast<std::uint32_t>(id));
    cumulative_.push_back(cumulative);
  }
}

BitString BornSampler::draw(Rng& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, cumulative_.back());
  const double u = uniform(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return table_->at(ids_[static_cast<std::size_t>(it - cumulative_.begin())]);
}

}  // namespace qgps
