#pragma once

#include <stdexcept>
#include <string>

namespace rothe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a coefficient law or transform.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Value beyond a tabulated range or a stored time span.
class RangeError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Time step violates tau < 1/C_L, the unique-solvability bound of a step.
class TauTooLarge : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class FixedPointStall : public Error {
 public:
  using Error::Error;
};

class MonotonicityViolation : public Error {
 public:
  using Error::Error;
};

class NoFront : public Error {
 public:
  using Error::Error;
};

class OracleUnavailable : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario description; carries the offending line when known.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Data violates one of the model's structural assumptions.
class InvalidProblem : public Error {
 public:
  using Error::Error;
};

}  // namespace rothe
