#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mlnl {

struct InvalidFieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSymbolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedVersionError : FormatError {
  using FormatError::FormatError;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Krylov iteration exhausted max_iter without reaching the tolerance.
struct SolverDivergenceError : std::runtime_error {
  SolverDivergenceError(const std::string& what, double residual, int iters)
      : std::runtime_error(what), final_residual(residual), iterations(iters) {}
  double final_residual;
  int iterations;
};

struct GroundStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Newton refinement stagnated; carries the best residual reached.
struct RefinementError : std::runtime_error {
  RefinementError(const std::string& what, double residual)
      : std::runtime_error(what), best_residual(residual) {}
  double best_residual;
};

/// Measured kernel dimension of the linearized operator differs from n.
struct KernelDimensionError : std::runtime_error {
  KernelDimensionError(const std::string& what, int measured, int expected)
      : std::runtime_error(what), measured_dimension(measured), expected_dimension(expected) {}
  int measured_dimension;
  int expected_dimension;
};

/// Fixed-point iteration for the perturbation failed to contract.
struct ContractionFailureError : std::runtime_error {
  ContractionFailureError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), ratio_history(std::move(history)) {}
  std::vector<double> ratio_history;
};

/// The reduced-energy minimizer landed on the collar of the admissible set.
struct BoundaryMinimumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mlnl
