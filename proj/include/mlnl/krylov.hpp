#pragma once

#include <functional>

#include "mlnl/grid.hpp"

namespace mlnl {

using VecOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using FieldOp = std::function<ScalarField(const ScalarField&)>;

struct KrylovOptions {
  double tol = 1e-10;  // relative residual target
  int max_iter = 2000;
  int restart = 60;                          // GMRES restart length
  VecOp preconditioner;                      // approximate inverse, optional
  const Eigen::VectorXd* initial_guess = nullptr;
  bool throw_on_divergence = true;
};

struct KrylovStats {
  int iterations = 0;
  double residual = 0.0;  // relative
  bool converged = false;
};

/// Preconditioned conjugate gradient for symmetric positive operators.
Eigen::VectorXd conjugate_gradient(const VecOp& op, const Eigen::VectorXd& rhs,
                                   const KrylovOptions& opts, KrylovStats* stats = nullptr);

/// Restarted GMRES with right preconditioning, for the nonsymmetric and
/// indefinite systems (Newton Jacobians, bordered saddle systems).
Eigen::VectorXd gmres(const VecOp& op, const Eigen::VectorXd& rhs, const KrylovOptions& opts,
                      KrylovStats* stats = nullptr);

/// Field-level matrix-free solve: ||op(x) - rhs||_2 <= tol * ||rhs||_2.
/// Chooses CG when symmetric_positive, restarted GMRES otherwise.
ScalarField krylov_solve(const FieldOp& op, const ScalarField& rhs, double tol, int max_iter,
                         KrylovStats* stats = nullptr, const FieldOp& preconditioner = {},
                         bool symmetric_positive = true);

}  // namespace mlnl
