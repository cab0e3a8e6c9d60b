#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

/// Base class for all errors raised by the library. The exit code is the
/// one the command-line front end reports for this class of failure.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Bad parameters, inconsistent configuration, violated preconditions.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what, 2) {}
};

/// Blow-up, non-convergence, missing bracket, step-size underflow.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(what, 3) {}
};

/// A verdict that could not be reached at the requested resolution.
class Inconclusive : public Error {
 public:
  explicit Inconclusive(const std::string& what) : Error(what, 4) {}
};

}  // namespace frontlab
