#pragma once

#include <vector>

#include "mlnl/krylov.hpp"

namespace mlnl {

struct RitzPair {
  double lambda = 0.0;
  Eigen::VectorXd vector;
};

struct LanczosOptions {
  int wanted = 12;        // Ritz pairs to converge
  int max_steps = 160;    // per pass, full reorthogonalization
  int max_passes = 3;     // deflated restarts to split degenerate clusters
  double ritz_tol = 1e-9;
  unsigned seed = 2024;
};

/// Bottom eigenvalues of a symmetric operator A via shift-invert Lanczos on
/// (A + sigma)^{-1}. `solve_shifted` must apply (A + sigma)^{-1}; sigma must
/// make the shifted operator positive definite. Returns pairs sorted by
/// ascending lambda. Degenerate clusters are recovered by deflated restart
/// passes with fresh start vectors.
std::vector<RitzPair> bottom_spectrum(const VecOp& solve_shifted, double sigma, Eigen::Index n,
                                      const LanczosOptions& opts);

}  // namespace mlnl
