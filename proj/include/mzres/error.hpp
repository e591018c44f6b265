#pragma once

#include <stdexcept>
#include <string>

namespace mzres {

// Base class for every failure raised by the library. The CLI maps
// UsageError to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public Error {
 public:
  explicit InvalidDimension(int d)
      : Error("dimension must be odd and >= 3, got " + std::to_string(d)) {}
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class ContourError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

inline void require_odd_dimension(int d) {
  if (d < 3 || d % 2 == 0) throw InvalidDimension(d);
}

}  // namespace mzres
