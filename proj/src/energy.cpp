#include "mlnl/energy.hpp"

#include <cmath>

#include "mlnl/quadrature.hpp"

namespace mlnl {

double energy_I_eps(const ScalarField& u, const DomainMask& mask, const ModelParams& params) {
  require_finite(u, "energy_I_eps");
  require_same_grid(u, mask.signed_distance);
  for (Eigen::Index i = 0; i < u.values.size(); ++i)
    if (mask.interior[i] == 0.0 && u.values[i] != 0.0)
      throw PreconditionError("energy_I_eps: field has nonzero exterior values");
  const SymbolSpec sym = SymbolSpec::mixed(params.s, 1.0);
  const double quad = 0.5 * quadratic_form(u, sym);
  const ScalarField up1(u.grid, mask.interior * u.values.max(0.0).pow(params.p + 1.0));
  return quad - integrate(up1) / (params.p + 1.0);
}

EnergyReport reduced_energy_H(const DomainMask& mask, const Point& xi, const GroundState& gs,
                              double tol) {
  const double d = mask.distance_at(xi);
  if (d < 2.0)
    throw PreconditionError("reduced_energy_H: dist(xi, boundary of Omega_eps) must be >= 2");
  const GridSpec& grid = mask.grid;
  const ModelParams& params = gs.params;

  const ScalarField w_xi = translate(gs.w, xi);
  const ScalarField wp(grid, w_xi.values.max(0.0).pow(params.p));

  DirichletOptions dopts;
  dopts.tol = tol;
  dopts.symbol = SymbolSpec::mixed(params.s, 1.0);
  const ScalarField guess(grid, mask.interior * w_xi.values);
  dopts.initial_guess = &guess;
  const DirichletSolve solve = solve_dirichlet(wp, mask, nullptr, dopts);
  const ScalarField& ubar = solve.solution;

  const ScalarField v = deficiency_v(w_xi, ubar);

  EnergyReport report;
  report.eps = mask.eps;
  report.d = d;
  report.solve_iterations = solve.iterations;
  report.H_eps = integrate(ScalarField(grid, mask.interior * wp.values * v.values));
  report.I_eps = energy_I_eps(ubar, mask, params);
  report.I_w = gs.energy;
  report.remainder = report.I_eps - report.I_w - 0.5 * report.H_eps;

  const Eigen::ArrayXd wp1 = w_xi.values.max(0.0).pow(params.p + 1.0);
  report.A1 = integrate(ScalarField(grid, (1.0 - mask.interior) * wp1));
  const double a2 = integrate(ScalarField(
      grid, mask.interior * (wp1 - ubar.values.max(0.0).pow(params.p + 1.0))));
  report.A2_excess = a2 / (params.p + 1.0) - report.H_eps;
  return report;
}

LandscapeScan scan_landscape(const DomainMask& mask, const GroundState& gs, double delta,
                             int stride, double tol) {
  if (!(delta > 0.0 && delta < 1.0))
    throw PreconditionError("scan_landscape: delta must lie in (0,1)");
  if (stride < 1) throw PreconditionError("scan_landscape: stride must be >= 1");
  const GridSpec& grid = mask.grid;
  const double inner_dist = delta / mask.eps;
  if (inner_dist - grid.spacing() < 2.0)
    throw GeometryError("scan_landscape: delta/eps must exceed 2 + h for the collar solves");
  if (mask.max_interior_distance <= inner_dist)
    throw GeometryError("scan_landscape: Omega_{eps,delta} is empty; reduce delta");

  const double h = grid.spacing();
  LandscapeScan scan;
  scan.interior_min = std::numeric_limits<double>::infinity();
  scan.collar_min = std::numeric_limits<double>::infinity();

  // interior candidates on the strided lattice; the collar (the one-cell
  // shell of the Omega_{eps,delta} boundary) is sampled in full, since its
  // minimum is the quantity of interest and subsampling can miss it
  bool any_interior = false;
  for (Eigen::Index flat = 0; flat < grid.cell_count(); ++flat) {
    const double sd = mask.signed_distance.values[flat];
    const bool collar = sd <= inner_dist && sd > inner_dist - h;
    bool on_lattice = true;
    const auto idx = multi_index(grid, flat);
    for (int dax = 0; dax < grid.dim; ++dax)
      if (idx[dax] % stride != 0) on_lattice = false;
    const bool interior = on_lattice && sd > inner_dist;
    if (!interior && !collar) continue;

    const Point xi = cell_center(grid, flat);
    const EnergyReport rep = reduced_energy_H(mask, xi, gs, tol);
    LandscapeSample sample;
    sample.xi = xi;
    sample.H = rep.H_eps;
    sample.d = rep.d;
    sample.remainder = rep.remainder;
    sample.collar = collar;
    scan.samples.push_back(sample);
    if (interior) {
      any_interior = true;
      if (rep.H_eps < scan.interior_min) {
        scan.interior_min = rep.H_eps;
        scan.interior_argmin = xi;
      }
    } else {
      scan.collar_min = std::min(scan.collar_min, rep.H_eps);
    }
  }
  if (!any_interior)
    throw InsufficientDataError(
        "scan_landscape: stride larger than the interior width, no samples");

  // power-law fit of H against d over [2, 0.8 d_max]
  std::vector<double> ds, Hs;
  const double d_hi = 0.8 * mask.max_interior_distance;
  for (const auto& sample : scan.samples)
    if (sample.d >= 2.0 && sample.d <= d_hi) {
      ds.push_back(sample.d);
      Hs.push_back(sample.H);
    }
  if (ds.size() >= 2) scan.fit = fit_power_law(ds, Hs);
  return scan;
}

}  // namespace mlnl
