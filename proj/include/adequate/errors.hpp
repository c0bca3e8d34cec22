#pragma once

#include <stdexcept>
#include <string>

namespace adequate {

// Argument outside the mathematical domain of an operation (p outside (0,1),
// sigma <= 0, empty sample, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid distribution parameters (df <= 0, a <= 0, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Missing tables, unregistered statistics, malformed configuration.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an algorithm does not hold for the input.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Malformed input data (with a 1-based line number when known).
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace adequate
