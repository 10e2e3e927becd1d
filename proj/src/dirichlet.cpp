#include "mlnl/dirichlet.hpp"

#include <cmath>

#include "mlnl/krylov.hpp"
#include "mlnl/quadrature.hpp"

namespace mlnl {

DirichletSolve solve_dirichlet(const ScalarField& rhs, const DomainMask& mask,
                               const ScalarField* potential, const DirichletOptions& opts) {
  require_finite(rhs, "solve_dirichlet rhs");
  require_same_grid(rhs, mask.signed_distance);
  if (potential) {
    require_same_grid(rhs, *potential);
    if (!potential->all_finite())
      throw InvalidFieldError("solve_dirichlet: potential contains NaN or Inf");
  }
  if (!(opts.tol > 0.0)) throw PreconditionError("solve_dirichlet: tol must be positive");

  const GridSpec grid = rhs.grid;
  const Eigen::ArrayXd& M = mask.interior;
  const SymbolSpec sym = opts.symbol;

  const auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const ScalarField xm(grid, M * x.array());
    Eigen::ArrayXd ax = apply_multiplier(xm, sym).values;
    if (potential) ax -= potential->values * xm.values;
    return (M * ax + (1.0 - M) * x.array()).matrix();
  };
  const auto precond = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    const ScalarField rm(grid, M * r.array());
    const Eigen::ArrayXd sm = solve_multiplier(rm, sym).values;
    return (M * sm + (1.0 - M) * r.array()).matrix();
  };

  KrylovOptions kopts;
  kopts.tol = opts.tol;
  kopts.max_iter = opts.max_iter;
  kopts.preconditioner = precond;
  Eigen::VectorXd x0;
  if (opts.initial_guess) {
    require_same_grid(rhs, *opts.initial_guess);
    x0 = (M * opts.initial_guess->values).matrix();
    kopts.initial_guess = &x0;
  }

  const Eigen::VectorXd b = (M * rhs.values).matrix();
  KrylovStats stats;
  // CG on the coercive zero-potential operator; restarted GMRES once a
  // potential can make the masked operator indefinite.
  const Eigen::VectorXd x = potential ? gmres(apply, b, kopts, &stats)
                                      : conjugate_gradient(apply, b, kopts, &stats);

  DirichletSolve out;
  out.solution = ScalarField(grid, M * x.array());
  out.residual = stats.residual;
  out.iterations = stats.iterations;

  double min_interior = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < M.size(); ++i)
    if (M[i] > 0.0) min_interior = std::min(min_interior, out.solution.values[i]);
  out.min_interior_value = min_interior;

  if (potential) {
    const double num = inner(out.solution, ScalarField(grid, M * (apply(x).array() - (1.0 - M) * x.array())));
    const double den = inner(out.solution, out.solution);
    out.indefinite = den > 0.0 && num < 0.0;
  }

  if (opts.check_positivity && !potential) {
    const Eigen::ArrayXd rin = M * rhs.values;
    if (rin.minCoeff() >= 0.0 && rin.maxCoeff() > 0.0 && out.min_interior_value <= 0.0)
      throw MaximumPrincipleError(
          "solve_dirichlet: nonnegative right-hand side produced a nonpositive interior value");
  }
  return out;
}

ScalarField barrier_h(const DomainMask& mask, const Point& xi, const ScalarField& K,
                      const SymbolSpec& sym) {
  require_finite(K, "barrier_h K");
  require_same_grid(K, mask.signed_distance);
  if (mask.distance_at(xi) < 1.0)
    throw PreconditionError("barrier_h: dist(xi, boundary) must be at least 1");
  const GridSpec& grid = K.grid;
  // K is centered at the grid's center cell; shift it to xi.
  Point center_cell(grid.dim);
  for (int d = 0; d < grid.dim; ++d) center_cell[d] = 0.5 * grid.spacing();
  const ScalarField K_xi = translate(K, xi - center_cell);
  const ScalarField g(grid, (1.0 - mask.interior) * K_xi.values);
  return solve_multiplier(g, sym);
}

double barrier_tail_estimate(const DomainMask& mask, const Point& xi, double s) {
  const double margin = mask.grid.half_width - xi.cwiseAbs().maxCoeff();
  return std::pow(margin, -(mask.grid.dim + 4.0 * s));
}

ScalarField deficiency_v(const ScalarField& w_xi, const ScalarField& ubar) {
  require_same_grid(w_xi, ubar);
  return ScalarField(w_xi.grid, w_xi.values - ubar.values);
}

double weighted_norm(const ScalarField& field, const Point& xi, double mu) {
  require_finite(field, "weighted_norm");
  if (!(mu > 0.0)) throw PreconditionError("weighted_norm: mu must be positive");
  const Eigen::ArrayXd r = radius_field(field.grid, xi);
  return ((1.0 + r).pow(mu) * field.values.abs()).maxCoeff();
}

}  // namespace mlnl
