#include "qgps/fixed_point.hpp"

#include <cmath>
#include <string>

#include "qgps/errors.hpp"

namespace qgps {

void FixedPointFormat::validate() const {
  if (total_bits < 2 || total_bits > 32) {
    throw InvalidFormatError("total_bits must lie in [2, 32], got " + std::to_string(total_bits));
  }
  if (frac_bits < 0 || frac_bits >= total_bits) {
    throw InvalidFormatError("frac_bits must lie in [0, total_bits), got " +
                             std::to_string(frac_bits));
  }
}

double FixedPointFormat::step() const { return std::ldexp(1.0, -frac_bits); }
double FixedPointFormat::min_value() const {
  return std::ldexp(static_cast<double>(min_raw()), -frac_bits);
}
double FixedPointFormat::max_value() const {
  return std::ldexp(static_cast<double>(max_raw()), -frac_bits);
}

std::int64_t scaled_round(double v, const FixedPointFormat& fmt) {
  // std::round is ties-away-from-zero; ldexp is exact.
  const double scaled = std::round(std::ldexp(v, fmt.frac_bits));
  if (scaled >= 0x1p62) return std::int64_t{1} << 62;
  if (scaled <= -0x1p62) return -(std::int64_t{1} << 62);
  return static_cast<std::int64_t>(scaled);
}

std::int64_t raw_value(const BitString& bits) {
  const std::size_t width = bits.width();
  if (width == 0 || width > 64) throw WidthMismatchError("raw_value: width must lie in [1, 64]");
  const std::uint64_t u = bits.to_uint();
  if (width == 64) return static_cast<std::int64_t>(u);
  if (bits.bit(0)) return static_cast<std::int64_t>(u) - (std::int64_t{1} << width);
  return static_cast<std::int64_t>(u);
}

BitString encode_raw(std::int64_t raw, const FixedPointFormat& fmt) {
  return BitString::from_uint(static_cast<std::uint64_t>(raw),
                              static_cast<std::size_t>(fmt.total_bits));
}

BitString encode_scalar(double v, const FixedPointFormat& fmt) {
  return encode_scalar(v, fmt, OverflowPolicy::kError).bits;
}

EncodedScalar encode_scalar(double v, const FixedPointFormat& fmt, OverflowPolicy policy) {
  fmt.validate();
  if (std::isnan(v)) throw OverflowError("cannot encode NaN");
  std::int64_t raw = scaled_round(v, fmt);
  bool saturated = false;
  if (raw < fmt.min_raw() || raw > fmt.max_raw()) {
    if (policy == OverflowPolicy::kError) {
      throw OverflowError("value " + std::to_string(v) + " outside fixed-point range [" +
                          std::to_string(fmt.min_value()) + ", " +
                          std::to_string(fmt.max_value()) + "]");
    }
    raw = raw < fmt.min_raw() ? fmt.min_raw() : fmt.max_raw();
    saturated = true;
  }
  return {encode_raw(raw, fmt), saturated};
}

double decode_scalar(const BitString& bits, const FixedPointFormat& fmt) {
  fmt.validate();
  if (bits.width() != static_cast<std::size_t>(fmt.total_bits)) {
    throw WidthMismatchError("decode_scalar: expected width " + std::to_string(fmt.total_bits) +
                             ", got " + std::to_string(bits.width()));
  }
  return std::ldexp(static_cast<double>(raw_value(bits)), -fmt.frac_bits);
}

BitString negate_bits(const BitString& bits) {
  BitString out(bits.width());
  // Ripple the +1 from the least significant end.
  bool carry = true;
  for (std::size_t i = bits.width(); i-- > 0;) {
    const bool flipped = !bits.bit(i);
    out.set_bit(i, flipped != carry);
    carry = flipped && carry;
  }
  return out;
}

BitString encode_point(std::span<const double> x, const FixedPointFormat& fmt) {
  fmt.validate();
  const auto d = static_cast<std::size_t>(fmt.total_bits);
  BitString out(x.size() * d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    try {
      out.assign(i * d, encode_scalar(x[i], fmt));
    } catch (const OverflowError& e) {
      throw OverflowError("coordinate " + std::to_string(i) + ": " + e.what(),
                          static_cast<std::ptrdiff_t>(i));
    }
  }
  return out;
}

std::vector<double> decode_point(const BitString& bits, const FixedPointFormat& fmt) {
  fmt.validate();
  const auto d = static_cast<std::size_t>(fmt.total_bits);
  if (bits.width() % d != 0) {
    throw WidthMismatchError("decode_point: width " + std::to_string(bits.width()) +
                             " is not a multiple of " + std::to_string(d));
  }
  std::vector<double> x(bits.width() / d);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = decode_scalar(bits.slice(i * d, d), fmt);
  return x;
}

int sign_bit(const BitString& bits) {
  if (bits.empty()) throw WidthMismatchError("sign_bit of an empty bit string");
  return bits.bit(0) ? 1 : 0;
}

bool is_representable(double v, const FixedPointFormat& fmt) {
  if (!std::isfinite(v)) return false;
  const double scaled = std::ldexp(v, fmt.frac_bits);
  if (scaled != std::floor(scaled)) return false;
  return scaled >= static_cast<double>(fmt.min_raw()) && scaled <= static_cast<double>(fmt.max_raw());
}

}  // namespace qgps
