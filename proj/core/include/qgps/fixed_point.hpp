#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgps/bit_string.hpp"

namespace qgps {

// Two's-complement fixed-point layout of one scalar: `total_bits` bits with
// `frac_bits` of them after the binary point. The grid step is 2^-frac_bits.
struct FixedPointFormat {
  int total_bits = 32;
  int frac_bits = 16;

  // Throws InvalidFormatError unless 2 <= total_bits <= 32 and
  // 0 <= frac_bits < total_bits.
  void validate() const;

  std::int64_t min_raw() const { return -(std::int64_t{1} << (total_bits - 1)); }
  std::int64_t max_raw() const { return (std::int64_t{1} << (total_bits - 1)) - 1; }
  double step() const;
  double min_value() const;
  double max_value() const;

  friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;
};

enum class OverflowPolicy { kError, kSaturate };

struct EncodedScalar {
  BitString bits;
  bool saturated = false;
};

// round(v * 2^q), nearest with ties away from zero. No range check.
std::int64_t scaled_round(double v, const FixedPointFormat& fmt);

// Raw two's-complement integer held by `bits` (sign-extended).
std::int64_t raw_value(const BitString& bits);

BitString encode_raw(std::int64_t raw, const FixedPointFormat& fmt);

// Throws OverflowError when the rounded value does not fit in the format.
BitString encode_scalar(double v, const FixedPointFormat& fmt);
// With kSaturate, out-of-range values clamp to the nearest end of the range
// and the result is flagged. NaN always throws.
EncodedScalar encode_scalar(double v, const FixedPointFormat& fmt, OverflowPolicy policy);

// Throws WidthMismatchError when the width differs from fmt.total_bits.
double decode_scalar(const BitString& bits, const FixedPointFormat& fmt);

// Flip every bit and add one, modulo 2^width. The most negative value maps
// to itself.
BitString negate_bits(const BitString& bits);

// Coordinates concatenated in order, each in fmt.total_bits bits. Throws
// OverflowError carrying the offending coordinate index.
BitString encode_point(std::span<const double> x, const FixedPointFormat& fmt);
std::vector<double> decode_point(const BitString& bits, const FixedPointFormat& fmt);

// Most significant bit; 1 iff the two's-complement value is negative.
int sign_bit(const BitString& bits);

// True when v lies exactly on the format grid and inside its range.
bool is_representable(double v, const FixedPointFormat& fmt);

}  // namespace qgps
