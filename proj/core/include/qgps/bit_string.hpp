#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace qgps {

// Fixed-width string of bits. Index 0 is the most significant (leftmost)
// bit, which is also how the string renders: "0110" has bit(1) == 1.
//
// Bits are packed MSB-first into 64-bit words, so comparing the word
// vectors lexicographically orders strings of equal width numerically.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t width);

  // Parses a string of '0'/'1' characters, most significant first.
  static BitString from_string(std::string_view text);
  // Low `width` bits of `value`; width must be <= 64.
  static BitString from_uint(std::uint64_t value, std::size_t width);

  std::size_t width() const noexcept { return width_; }
  bool empty() const noexcept { return width_ == 0; }

  bool bit(std::size_t index) const;
  void set_bit(std::size_t index, bool value);

  // Unsigned value of bits [offset, offset + length); length <= 64.
  std::uint64_t slice_uint(std::size_t offset, std::size_t length) const;
  // Overwrites bits [offset, offset + length) with the low bits of value.
  void assign_uint(std::size_t offset, std::size_t length, std::uint64_t value);

  BitString slice(std::size_t offset, std::size_t length) const;
  void assign(std::size_t offset, const BitString& bits);

  // Whole string as an unsigned integer; width must be <= 64.
  std::uint64_t to_uint() const { return slice_uint(0, width_); }

  bool all_zero() const noexcept;
  std::string to_string() const;

  friend BitString concat(const BitString& high, const BitString& low);

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

  std::size_t hash() const noexcept;

 private:
  void check_range(std::size_t offset, std::size_t length) const;

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

BitString concat(const BitString& high, const BitString& low);

}  // namespace qgps

template <>
struct std::hash<qgps::BitString> {
  std::size_t operator()(const qgps::BitString& b) const noexcept { return b.hash(); }
};
