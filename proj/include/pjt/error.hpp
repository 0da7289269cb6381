#pragma once

#include <stdexcept>
#include <string>

namespace pjt {

// Bad parameters, malformed config or CSV. CLI exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-convergence, tracking loss, label mismatch. CLI exit code 3.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the PES fit when the data cannot determine some parameters.
class IdentifiabilityError : public SolverFailure {
 public:
  using SolverFailure::SolverFailure;
};

}  // namespace pjt
