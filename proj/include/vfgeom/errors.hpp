#pragma once

#include <stdexcept>
#include <string>

namespace vfgeom {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A point or parameter lies outside the set where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Rank deficiency: singular Gram matrix, degenerate immersion, dependent seed.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A vector with |<v,v>| below the null threshold in an indefinite form.
class NullVectorError : public Error {
 public:
  using Error::Error;
};

/// A constructor input fails one of its stated hypotheses.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Unknown name or malformed option in a run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vfgeom
