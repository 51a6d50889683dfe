#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace colim {

// Numerical failures are distinct from contract violations (std::invalid_argument):
// the CLI maps the former to exit status 2 and the latter to 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix logarithm requested for an eigenvalue on the closed negative real axis.
class BranchCutError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Eigendecomposition too ill-conditioned to trust (defective or nearly so).
class DecompositionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(const std::string& what, double condition)
      : NumericalError(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}

  [[nodiscard]] double condition() const noexcept { return condition_; }

 private:
  double condition_ = std::numeric_limits<double>::infinity();
};

class SimulationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace colim
