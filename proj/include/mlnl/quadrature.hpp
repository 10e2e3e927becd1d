#pragma once

#include <cmath>

#include "mlnl/grid.hpp"

namespace mlnl {

/// Midpoint rule: h^n * sum of values. Exact for constants; antisymmetric
/// integrands cancel exactly on the symmetric cell-centered grid.
inline double integrate(const ScalarField& f) {
  return f.grid.cell_volume() * f.values.sum();
}

inline double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  return a.grid.cell_volume() * (a.values * b.values).sum();
}

inline double l2_norm(const ScalarField& f) {
  return std::sqrt(f.grid.cell_volume() * f.values.square().sum());
}

}  // namespace mlnl
