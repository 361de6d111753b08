#pragma once

#include <stdexcept>
#include <string>

namespace bigs {

// Failure taxonomy shared by the library and the CLI.  Configuration and
// precondition problems map to exit code 2, everything else to exit 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Scalar argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
  using Error::Error;
};

// A caller violated a documented operation precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

// Malformed configuration file, key, or CLI request.
class ConfigurationError : public Error {
public:
  using Error::Error;
};

// Profile left the admissible set |du| <= 1; carries the offending slope.
class ConstraintViolation : public Error {
public:
  ConstraintViolation(const std::string& what, double supGradient)
      : Error(what), sup_gradient_(supGradient) {}
  double supGradient() const noexcept { return sup_gradient_; }

private:
  double sup_gradient_;
};

// Input is degenerate for the requested operation (e.g. identically zero).
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

// Root search exhausted its guard without a sign change.
class NoRootError : public Error {
public:
  using Error::Error;
};

// Endpoint classifications do not bracket the sought transition.
class BracketError : public Error {
public:
  using Error::Error;
};

// Iteration failed to make progress or produced non-finite values.
class NumericalFailure : public Error {
public:
  using Error::Error;
};

}  // namespace bigs
