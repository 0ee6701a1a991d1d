#pragma once

#include <stdexcept>
#include <string>

namespace bogolab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model or sweep configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A basis or block exceeds the configured dimension guard.
class SizeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Coherent vector tail mass above tolerance. Carries the smallest cap that
// would have been accepted.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int required_n_cap)
      : Error(what), required_n_cap_(required_n_cap) {}
  int required_n_cap() const noexcept { return required_n_cap_; }

 private:
  int required_n_cap_;
};

// Internal consistency failure while assembling an operator.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bogolab
