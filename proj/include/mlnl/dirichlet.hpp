#pragma once

#include "mlnl/domain.hpp"
#include "mlnl/spectral.hpp"

namespace mlnl {

struct MaximumPrincipleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DirichletSolve {
  ScalarField solution;  // identically 0 on exterior cells
  double residual = 0.0;
  int iterations = 0;
  double min_interior_value = 0.0;
  bool indefinite = false;  // projected Rayleigh quotient at the solution < 0
};

struct DirichletOptions {
  double tol = 1e-10;
  int max_iter = 4000;
  const ScalarField* initial_guess = nullptr;
  /// Maximum-principle guard: for rhs >= 0 (not identically 0) and no
  /// potential, a nonpositive interior minimum throws.
  bool check_positivity = false;
  SymbolSpec symbol = SymbolSpec::mixed(0.5, 1.0);
};

/// Solves (Op - potential) u = rhs on interior cells with the nonlocal
/// Dirichlet condition u = 0 on all exterior cells, via Krylov iteration on
/// the masked operator M (Op - potential) M + (I - M).
DirichletSolve solve_dirichlet(const ScalarField& rhs, const DomainMask& mask,
                               const ScalarField* potential, const DirichletOptions& opts);

/// Barrier h_xi(x) = \int_{exterior} K(x-z) K(xi-z) dz via two FFT passes:
/// the resolvent applied to K_xi restricted to the exterior. K must be the
/// unit-mass fundamental solution on the same grid centered at the grid's
/// center cell (+h/2 per axis).
ScalarField barrier_h(const DomainMask& mask, const Point& xi, const ScalarField& K,
                      const SymbolSpec& sym);

/// Estimated tail of the barrier integral beyond the box (reported, never
/// added): (L - |xi|_inf)^{-(n+4s)}.
double barrier_tail_estimate(const DomainMask& mask, const Point& xi, double s);

/// v_xi = w_xi - ubar, the boundary-induced deficiency.
ScalarField deficiency_v(const ScalarField& w_xi, const ScalarField& ubar);

/// sup over the grid of (1+|x-xi|)^mu |field(x)|.
double weighted_norm(const ScalarField& field, const Point& xi, double mu);

}  // namespace mlnl
