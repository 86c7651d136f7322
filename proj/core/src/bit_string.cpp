#include "qgps/bit_string.hpp"

#include <algorithm>
#include <stdexcept>

namespace qgps {
namespace {

constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t width) { return (width + kWordBits - 1) / kWordBits; }

// Position of string index i inside its word, counting from the LSB.
constexpr std::size_t shift_of(std::size_t index) { return kWordBits - 1 - index % kWordBits; }

}  // namespace

BitString::BitString(std::size_t width) : width_(width), words_(words_for(width), 0) {}

BitString BitString::from_string(std::string_view text) {
  BitString out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      out.set_bit(i, true);
    } else if (text[i] != '0') {
      throw std::invalid_argument("bit string may only contain '0' and '1': " +
                                  std::string(text));
    }
  }
  return out;
}

BitString BitString::from_uint(std::uint64_t value, std::size_t width) {
  BitString out(width);
  out.assign_uint(0, width, value);
  return out;
}

void BitString::check_range(std::size_t offset, std::size_t length) const {
  if (offset > width_ || length > width_ - offset) {
    throw std::out_of_range("bit range [" + std::to_string(offset) + ", " +
                            std::to_string(offset + length) + ") outside width " +
                            std::to_string(width_));
  }
}

bool BitString::bit(std::size_t index) const {
  check_range(index, 1);
  return (words_[index / kWordBits] >> shift_of(index)) & 1U;
}

void BitString::set_bit(std::size_t index, bool value) {
  check_range(index, 1);
  const std::uint64_t mask = std::uint64_t{1} << shift_of(index);
  auto& word = words_[index / kWordBits];
  word = value ? (word | mask) : (word & ~mask);
}

std::uint64_t BitString::slice_uint(std::size_t offset, std::size_t length) const {
  if (length > kWordBits) throw std::invalid_argument("slice_uint: length exceeds 64 bits");
  check_range(offset, length);
  if (length == 0) return 0;
  // Fast path: the slice lies inside one word.
  const std::size_t first = offset / kWordBits;
  const std::size_t last = (offset + length - 1) / kWordBits;
  if (first == last) {
    const std::size_t shift = kWordBits - (offset % kWordBits) - length;
    const std::uint64_t mask = length == kWordBits ? ~std::uint64_t{0}
                                                   : (std::uint64_t{1} << length) - 1;
    return (words_[first] >> shift) & mask;
  }
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < length; ++i) value = (value << 1) | (bit(offset + i) ? 1U : 0U);
  return value;
}

void BitString::assign_uint(std::size_t offset, std::size_t length, std::uint64_t value) {
  if (length > kWordBits) throw std::invalid_argument("assign_uint: length exceeds 64 bits");
  check_range(offset, length);
  if (length == 0) return;
  const std::size_t first = offset / kWordBits;
  const std::size_t last = (offset + length - 1) / kWordBits;
  if (first == last) {
    const std::size_t shift = kWordBits - (offset % kWordBits) - length;
    const std::uint64_t mask = length == kWordBits ? ~std::uint64_t{0}
                                                   : (std::uint64_t{1} << length) - 1;
    words_[first] = (words_[first] & ~(mask << shift)) | ((value & mask) << shift);
    return;
  }
  for (std::size_t i = 0; i < length; ++i) {
    set_bit(offset + i, (value >> (length - 1 - i)) & 1U);
  }
}

BitString BitString::slice(std::size_t offset, std::size_t length) const {
  check_range(offset, length);
  BitString out(length);
  for (std::size_t done = 0; done < length;) {
    const std::size_t chunk = std::min(kWordBits, length - done);
    out.assign_uint(done, chunk, slice_uint(offset + done, chunk));
    done += chunk;
  }
  return out;
}

void BitString::assign(std::size_t offset, const BitString& bits) {
  check_range(offset, bits.width());
  for (std::size_t done = 0; done < bits.width();) {
    const std::size_t chunk = std::min(kWordBits, bits.width() - done);
    assign_uint(offset + done, chunk, bits.slice_uint(done, chunk));
    done += chunk;
  }
}

bool BitString::all_zero() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::string BitString::to_string() const {
  std::string out(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

BitString concat(const BitString& high, const BitString& low) {
  BitString out(high.width() + low.width());
  out.assign(0, high);
  out.assign(high.width(), low);
  return out;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
  if (auto c = a.width_ <=> b.width_; c != 0) return c;
  return a.words_ <=> b.words_;
}

std::size_t BitString::hash() const noexcept {
  // splitmix-style mixing of each word into the width.
  std::uint64_t h = width_ * 0x9E3779B97F4A7C15ULL;
  for (std::uint64_t w : words_) {
    std::uint64_t z = w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    h ^= z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

}  // namespace qgps
