#include "mlnl/ground_state.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mlnl/eigensolver.hpp"
#include "mlnl/krylov.hpp"
#include "mlnl/quadrature.hpp"

namespace mlnl {

namespace {

Eigen::ArrayXd positive_power(const Eigen::ArrayXd& v, double p) {
  return v.max(0.0).pow(p);
}

double relative_residual(const ScalarField& w, const SymbolSpec& sym, double p) {
  const ScalarField Aw = apply_multiplier(w, sym);
  const double num = std::sqrt((Aw.values - positive_power(w.values, p)).square().sum());
  const double den = std::sqrt(w.values.square().sum());
  return num / den;
}

}  // namespace

GroundState compute_ground_state(const ModelParams& params, const GridSpec& grid,
                                 std::optional<ScalarField> init,
                                 const GroundStateOptions& opts) {
  if (grid.dim != params.dim)
    throw PreconditionError("compute_ground_state: grid and params dimension mismatch");
  if (grid.spacing() > 0.25)
    throw PreconditionError("compute_ground_state: grid too coarse for the O(1) core (h > 0.25)");

  const SymbolSpec sym = SymbolSpec::mixed(params.s, 1.0);
  const double p = params.p;
  const double theta = std::pow(p, 1.0 / (p - 1.0));

  ScalarField w = init ? std::move(*init)
                       : sample(grid, [&](const Point& x) {
                           return theta * std::exp(-0.5 * x.squaredNorm());
                         });
  require_finite(w, "compute_ground_state init");

  // Phase (a): sup-normalized fixed point w <- theta * T(w)/sup T(w) with
  // T(w) = solve_multiplier(w_+^p). At a fixed point w = lambda T(w), the
  // unnormalized solution is lambda^{1/(p-1)} w.
  double lambda = 1.0;
  double resid = std::numeric_limits<double>::infinity();
  double prev_resid = resid;
  int stalls = 0;
  for (int it = 0; it < opts.max_fixed_point; ++it) {
    ScalarField g = solve_multiplier(ScalarField(grid, positive_power(w.values, p)), sym);
    const double sup = g.values.maxCoeff();
    if (!(sup > 0.0) || !std::isfinite(sup))
      throw GroundStateError("fixed-point iteration collapsed to zero or diverged; try a better init");
    lambda = theta / sup;
    w = ScalarField(grid, g.values * lambda);

    if (it % 5 == 4 || it + 1 == opts.max_fixed_point) {
      const double beta = std::pow(lambda, 1.0 / (p - 1.0));
      const ScalarField wt(grid, w.values * beta);
      resid = relative_residual(wt, sym, p);
      if (resid < opts.target_residual) break;
      if (resid > 0.97 * prev_resid) {
        if (++stalls >= 2) break;
      } else {
        stalls = 0;
      }
      prev_resid = resid;
    }
  }
  w = ScalarField(grid, w.values * std::pow(lambda, 1.0 / (p - 1.0)));
  resid = relative_residual(w, sym, p);

  // Phase (b): Newton on F(w) = Op w - w_+^p, Jacobian solved matrix-free
  // with the free resolvent as preconditioner.
  const auto precond = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return solve_multiplier(ScalarField(grid, v.array()), sym).values.matrix();
  };
  double best = resid;
  for (int it = 0; it < opts.max_newton && resid > opts.target_residual; ++it) {
    const Eigen::ArrayXd wp1 = p * positive_power(w.values, p - 1.0);
    const auto jac = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      const ScalarField f(grid, v.array());
      return (apply_multiplier(f, sym).values - wp1 * f.values).matrix();
    };
    const Eigen::VectorXd F =
        (apply_multiplier(w, sym).values - positive_power(w.values, p)).matrix();
    KrylovOptions kopts;
    kopts.tol = std::max(1e-8, 1e-3 * resid);
    kopts.max_iter = 600;
    kopts.preconditioner = precond;
    kopts.throw_on_divergence = false;
    const Eigen::VectorXd d = gmres(jac, -F, kopts);
    w = ScalarField(grid, w.values + d.array());
    resid = relative_residual(w, sym, p);
    if (resid >= 0.7 * best) {
      if (resid > opts.target_residual)
        throw RefinementError("Newton refinement stagnated", std::min(best, resid));
      break;
    }
    best = std::min(best, resid);
  }
  if (resid > opts.target_residual * 10.0 && resid > 1e-8)
    throw RefinementError("ground state did not reach the target residual", resid);
  if (!(w.values.maxCoeff() > 0.0))
    throw GroundStateError("ground state is nonpositive; try a better init");

  GroundState gs;
  gs.params = params;
  gs.w = w;
  gs.residual = resid;
  for (int d = 0; d < grid.dim; ++d) gs.modes.push_back(derivative(w, d));
  gs.alpha = inner(gs.modes[0], gs.modes[0]);
  gs.energy = 0.5 * quadratic_form(w, sym) -
              integrate(ScalarField(grid, positive_power(w.values, p + 1.0))) / (p + 1.0);

  if (opts.compute_spectrum) {
    // Shift-invert Lanczos on (A + sigma)^{-1}, A = Op - p w^{p-1}; sigma
    // keeps the shifted operator positive definite.
    const Eigen::ArrayXd wp1 = p * positive_power(w.values, p - 1.0);
    const double sigma = wp1.maxCoeff() + 1.0;
    SymbolSpec shifted = sym;
    shifted.mass = sym.mass + sigma;
    const auto shifted_precond = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return solve_multiplier(ScalarField(grid, v.array()), shifted).values.matrix();
    };
    const auto shifted_apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      const ScalarField f(grid, v.array());
      return (apply_multiplier(f, sym).values - wp1 * f.values + sigma * f.values).matrix();
    };
    const auto solve_shifted = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      KrylovOptions kopts;
      kopts.tol = 1e-11;
      kopts.max_iter = 800;
      kopts.preconditioner = shifted_precond;
      return conjugate_gradient(shifted_apply, v, kopts);
    };
    LanczosOptions lopts;
    lopts.wanted = opts.ritz_pairs;
    lopts.seed = opts.seed;
    const auto pairs = bottom_spectrum(solve_shifted, sigma, grid.cell_count(), lopts);

    // Correlation of each eigenfield with span{Z_i} via the modes' Gram matrix.
    const int n = grid.dim;
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = gs.modes[i].values.matrix().dot(gs.modes[j].values.matrix());
    const Eigen::MatrixXd Ginv = G.inverse();
    for (const auto& pair : pairs) {
      Eigen::VectorXd b(n);
      for (int i = 0; i < n; ++i) b[i] = gs.modes[i].values.matrix().dot(pair.vector);
      const double proj2 = b.dot(Ginv * b);
      SpectrumEntry e;
      e.lambda = pair.lambda;
      e.mode_correlation = std::sqrt(std::max(0.0, proj2)) / pair.vector.norm();
      gs.spectrum.push_back(e);
    }

    // Kernel band: |lambda| <= factor * gap, gap = smallest eigenvalue >= 0.01.
    double gap = 0.0;
    for (const auto& e : gs.spectrum)
      if (e.lambda >= 0.01) {
        gap = e.lambda;
        break;
      }
    gs.spectral_gap = gap;
    if (gap > 0.0)
      for (const auto& e : gs.spectrum)
        if (std::abs(e.lambda) <= opts.kernel_band_factor * gap) ++gs.kernel_dimension;
  }
  return gs;
}

ModeDecayReport mode_decay_report(const GroundState& gs) {
  const GridSpec& grid = gs.w.grid;
  const double r_in = 3.0;
  const double r_out = grid.half_width - 3.0;
  if (!(r_out > r_in))
    throw InsufficientDataError("mode_decay_report: annulus [3, L-3] is empty");
  Point origin = Point::Zero(grid.dim);
  ModeDecayReport report;
  report.first_pass_exponent = gs.params.decay_exponent();
  for (const auto& Z : gs.modes) {
    report.mode_fits.push_back(fit_decay(Z, origin, r_in, r_out));
    report.gradient_fits.push_back(fit_decay(gradient_magnitude(Z), origin, r_in, r_out));
    report.hessian_fits.push_back(fit_decay(hessian_magnitude(Z), origin, r_in, r_out));
  }
  return report;
}

double radial_monotonicity_break(const ScalarField& field, const Point& center, double r_max,
                                 double slack) {
  const GridSpec& g = field.grid;
  const int N = g.points_per_axis;
  // nearest cell to the center
  std::array<int, 3> jc{0, 0, 0};
  for (int d = 0; d < g.dim; ++d) {
    int j = static_cast<int>(std::floor((center[d] + g.half_width) / g.spacing()));
    jc[d] = std::min(std::max(j, 0), N - 1);
  }
  // rays: all sign/axis combinations of steps in {-1,0,1}^dim except 0
  std::vector<std::array<int, 3>> dirs;
  std::array<int, 3> step{0, 0, 0};
  const int lo = -1, hi = 1;
  for (int a = lo; a <= hi; ++a)
    for (int b = (g.dim > 1 ? lo : 0); b <= (g.dim > 1 ? hi : 0); ++b)
      for (int c = (g.dim > 2 ? lo : 0); c <= (g.dim > 2 ? hi : 0); ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        dirs.push_back({a, b, c});
      }
  double first_break = std::numeric_limits<double>::infinity();
  for (const auto& dir : dirs) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0;; ++k) {
      std::array<int, 3> idx = jc;
      bool inside = true;
      for (int d = 0; d < g.dim; ++d) {
        idx[d] += k * dir[d];
        if (idx[d] < 0 || idx[d] >= N) inside = false;
      }
      if (!inside) break;
      double r2 = 0.0;
      for (int d = 0; d < g.dim; ++d) {
        const double dx = g.coord(idx[d]) - center[d];
        r2 += dx * dx;
      }
      const double r = std::sqrt(r2);
      if (r > r_max) break;
      const double v = field.values[flat_index(g, idx)];
      if (v > prev + slack) {
        first_break = std::min(first_break, r);
        break;
      }
      prev = v;
    }
    (void)step;
  }
  return first_break;
}

}  // namespace mlnl
