#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qgps {

// Root of every error the library throws. Callers that only want to report
// and exit can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// fixed point
class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& what, std::ptrdiff_t coordinate = -1)
      : Error(what), coordinate_(coordinate) {}

  // Offending coordinate for point encodes, -1 for scalars.
  std::ptrdiff_t coordinate() const noexcept { return coordinate_; }

 private:
  std::ptrdiff_t coordinate_;
};

class WidthMismatchError : public Error {
 public:
  using Error::Error;
};

class InvalidFormatError : public Error {
 public:
  using Error::Error;
};

// quantum core
class CollisionError : public Error {
 public:
  using Error::Error;
};

class EmptyTargetsError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

// amplification
class DomainError : public Error {
 public:
  using Error::Error;
};

class SafetyCapReached : public Error {
 public:
  using Error::Error;
};

// pattern search
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class NotPositiveSpanningError : public Error {
 public:
  using Error::Error;
};

class MeshExhaustedError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgps
