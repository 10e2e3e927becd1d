#include "mlnl/reduction.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "mlnl/krylov.hpp"
#include "mlnl/quadrature.hpp"

namespace mlnl {

namespace {

Eigen::ArrayXd positive_power(const Eigen::ArrayXd& v, double p) {
  return v.max(0.0).pow(p);
}

}  // namespace

ReductionContext ReductionContext::make(const DomainMask& mask, const GroundState& gs,
                                        const Point& xi, double tol) {
  if (gs.kernel_dimension != gs.params.dim)
    throw PreconditionError(
        "reduction: measured kernel dimension " + std::to_string(gs.kernel_dimension) +
        " differs from n = " + std::to_string(gs.params.dim) +
        "; nondegeneracy assumption fails on this grid");
  ReductionContext ctx;
  ctx.mask = &mask;
  ctx.gs = &gs;
  ctx.xi = xi;
  ctx.w_xi = translate(gs.w, xi);
  for (const auto& Zi : gs.modes) ctx.Z.push_back(translate(Zi, xi));

  const GridSpec& grid = mask.grid;
  const ScalarField wp(grid, positive_power(ctx.w_xi.values, gs.params.p));
  DirichletOptions dopts;
  dopts.tol = tol;
  dopts.symbol = SymbolSpec::mixed(gs.params.s, 1.0);
  const ScalarField guess(grid, mask.interior * ctx.w_xi.values);
  dopts.initial_guess = &guess;
  const DirichletSolve solve = solve_dirichlet(wp, mask, nullptr, dopts);
  ctx.ubar = solve.solution;
  ctx.dirichlet_residual = solve.residual;
  ctx.dirichlet_iterations = solve.iterations;
  ctx.ubar_min_interior = solve.min_interior_value;
  ctx.v = deficiency_v(ctx.w_xi, ctx.ubar);
  return ctx;
}

ProjectedSolve solve_projected(const ScalarField& g, const ReductionContext& ctx, double tol) {
  require_finite(g, "solve_projected");
  const DomainMask& mask = *ctx.mask;
  const GroundState& gs = *ctx.gs;
  const GridSpec& grid = mask.grid;
  const int n = grid.dim;
  const Eigen::Index nc = grid.cell_count();
  const Eigen::ArrayXd& M = mask.interior;
  const SymbolSpec sym = SymbolSpec::mixed(gs.params.s, 1.0);
  const Eigen::ArrayXd pot = gs.params.p * positive_power(ctx.w_xi.values, gs.params.p - 1.0);

  // masked modes as border columns
  std::vector<Eigen::ArrayXd> MZ(n);
  for (int i = 0; i < n; ++i) MZ[i] = M * ctx.Z[i].values;

  // Symmetric bordered operator on [psi; a] (the returned multipliers are
  // c = -a):
  //   top = M L M psi + sum_i a_i MZ_i + (I-M) psi
  //   bot_j = MZ_j . psi
  const auto apply = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const ScalarField pm(grid, M * y.head(nc).array());
    Eigen::ArrayXd top = apply_multiplier(pm, sym).values - pot * pm.values;
    top = M * top + (1.0 - M) * y.head(nc).array();
    for (int i = 0; i < n; ++i) top += y[nc + i] * MZ[i];
    Eigen::VectorXd out(nc + n);
    out.head(nc) = top.matrix();
    for (int i = 0; i < n; ++i) out[nc + i] = MZ[i].matrix().dot(y.head(nc));
    return out;
  };

  // Block-diagonal preconditioner: masked free resolvent and the small
  // Schur complement of the border columns through it.
  const auto resolvent = [&](const Eigen::ArrayXd& r) -> Eigen::ArrayXd {
    const ScalarField rm(grid, M * r);
    return M * solve_multiplier(rm, sym).values;
  };
  Eigen::MatrixXd S(n, n);
  std::vector<Eigen::ArrayXd> RZ(n);
  for (int i = 0; i < n; ++i) RZ[i] = resolvent(MZ[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = MZ[i].matrix().dot(RZ[j].matrix());
  const Eigen::MatrixXd Sinv = S.inverse();

  const auto precond = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Eigen::VectorXd out(nc + n);
    const Eigen::ArrayXd r = y.head(nc).array();
    out.head(nc) = (resolvent(r) + (1.0 - M) * r).matrix();
    out.tail(n) = Sinv * y.tail(n);
    return out;
  };

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc + n);
  rhs.head(nc) = (M * g.values).matrix();

  KrylovOptions kopts;
  kopts.tol = tol;
  kopts.max_iter = 4000;
  kopts.restart = 80;
  kopts.preconditioner = precond;
  KrylovStats stats;
  const Eigen::VectorXd y = gmres(apply, rhs, kopts, &stats);

  ProjectedSolve out;
  out.psi = ScalarField(grid, M * y.head(nc).array());
  out.c = -y.tail(n);
  out.residual = stats.residual;
  out.iterations = stats.iterations;

  // Post-projection onto the discrete orthogonality constraint, using the
  // Gram matrix of the masked modes in the quadrature inner product.
  Eigen::MatrixXd G(n, n);
  Eigen::VectorXd b(n);
  const double vol = grid.cell_volume();
  for (int i = 0; i < n; ++i) {
    b[i] = vol * (MZ[i] * out.psi.values).sum();
    for (int j = 0; j < n; ++j) G(i, j) = vol * (MZ[i] * MZ[j]).sum();
  }
  const Eigen::VectorXd a = G.ldlt().solve(b);
  for (int i = 0; i < n; ++i) out.psi.values -= a[i] * MZ[i];

  double defect = 0.0;
  for (int i = 0; i < n; ++i)
    defect = std::max(defect, std::abs(vol * (MZ[i] * out.psi.values).sum()));
  out.orthogonality_defect = defect / gs.alpha;
  return out;
}

ProjectedSolve solve_projected(const ScalarField& g, const DomainMask& mask,
                               const GroundState& gs, const Point& xi, double tol) {
  const ReductionContext ctx = ReductionContext::make(mask, gs, xi, tol);
  return solve_projected(g, ctx, tol);
}

ScalarField nonlinear_error_E(const ScalarField& psi, const ScalarField& ubar,
                              const ScalarField& w_xi, double p, const DomainMask& mask) {
  require_same_grid(psi, ubar);
  require_same_grid(psi, w_xi);
  const Eigen::ArrayXd wp = positive_power(w_xi.values, p);
  const Eigen::ArrayXd wpm1 = positive_power(w_xi.values, p - 1.0);
  Eigen::ArrayXd e =
      positive_power(ubar.values + psi.values, p) - wp - p * wpm1 * psi.values;
  return ScalarField(psi.grid, mask.interior * e);
}

ReductionResult contract_psi_ctx(const ReductionContext& ctx, const ModelParams& params,
                                 const ContractionOptions& opts) {
  const DomainMask& mask = *ctx.mask;
  const GridSpec& grid = mask.grid;
  const double p = params.p;

  ScalarField psi = ScalarField::zero(grid);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(grid.dim);
  std::vector<double> ratios;
  double prev_diff = 0.0;
  int rising = 0;
  bool converged = false;
  int iters = 0;

  for (int k = 0; k < opts.max_iter; ++k, ++iters) {
    const ScalarField E = nonlinear_error_E(psi, ctx.ubar, ctx.w_xi, p, mask);
    const ProjectedSolve sol = solve_projected(E, ctx, opts.linear_tol);
    const ScalarField diff_field(grid, sol.psi.values - psi.values);
    const double diff = weighted_norm(diff_field, ctx.xi, params.mu);
    psi = sol.psi;
    c = sol.c;

    if (k > 0 && prev_diff > 0.0) {
      const double ratio = diff / prev_diff;
      ratios.push_back(ratio);
      if (ratio >= 1.0) {
        if (++rising >= 3)
          throw ContractionFailureError(
              "contraction stalled: successive-difference ratio >= 1 for 3 steps; "
              "try a smaller eps",
              ratios);
      } else {
        rising = 0;
      }
      // ratios must be non-increasing (up to slack) while far from the target
      if (ratios.size() >= 2 && diff > 100.0 * opts.tol &&
          ratio > opts.ratio_slack * ratios[ratios.size() - 2] && ratio >= 1.0)
        throw ContractionFailureError("contraction ratios increased before convergence", ratios);
    }
    prev_diff = diff;
    if (diff <= opts.tol) {
      converged = true;
      ++iters;
      break;
    }
  }
  if (!converged)
    throw ContractionFailureError("contraction did not reach tolerance within max_iter", ratios);

  ReductionResult out;
  out.xi = ctx.xi;
  out.psi = psi;
  out.c = c;
  out.psi_norm_weighted = weighted_norm(psi, ctx.xi, params.mu);
  out.u = ScalarField(grid, ctx.ubar.values + psi.values);
  out.J_eps = energy_I_eps(out.u, mask, params);
  out.iterations = iters;
  out.contraction_ratios = ratios;

  const SymbolSpec sym = SymbolSpec::mixed(params.s, 1.0);
  Eigen::ArrayXd res = apply_multiplier(out.u, sym).values - positive_power(out.u.values, p);
  for (int i = 0; i < grid.dim; ++i) res -= c[i] * ctx.Z[i].values;
  out.pde_residual = std::sqrt((mask.interior * res.square()).sum()) /
                     std::sqrt(out.u.values.square().sum());
  return out;
}

ReductionResult contract_psi(const DomainMask& mask, const GroundState& gs, const Point& xi,
                             const ModelParams& params, int max_iter, double tol) {
  ContractionOptions opts;
  opts.max_iter = max_iter;
  opts.tol = tol;
  const ReductionContext ctx = ReductionContext::make(mask, gs, xi, opts.linear_tol);
  return contract_psi_ctx(ctx, params, opts);
}

double reduced_J(const DomainMask& mask, const GroundState& gs, const Point& xi,
                 const ModelParams& params) {
  ContractionOptions opts;
  const ReductionContext ctx = ReductionContext::make(mask, gs, xi, opts.linear_tol);
  return contract_psi_ctx(ctx, params, opts).J_eps;
}

namespace {

// J evaluations cached per quantized xi within one optimization run.
class JCache {
 public:
  JCache(const DomainMask& mask, const GroundState& gs, const ModelParams& params,
         const ContractionOptions& copts)
      : mask_(mask), gs_(gs), params_(params), copts_(copts) {}

  const ReductionResult& at(const Point& xi) {
    const auto key = quantize(xi);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const ReductionContext ctx = ReductionContext::make(mask_, gs_, xi, copts_.linear_tol);
      it = cache_.emplace(key, contract_psi_ctx(ctx, params_, copts_)).first;
    }
    return it->second;
  }

  int evaluations() const { return static_cast<int>(cache_.size()); }

 private:
  std::array<long, 3> quantize(const Point& xi) const {
    std::array<long, 3> k{0, 0, 0};
    const double q = mask_.grid.spacing() * 1e-7;
    for (int d = 0; d < xi.size(); ++d) k[d] = std::lround(xi[d] / q);
    return k;
  }

  const DomainMask& mask_;
  const GroundState& gs_;
  const ModelParams& params_;
  ContractionOptions copts_;
  std::map<std::array<long, 3>, ReductionResult> cache_;
};

}  // namespace

ReductionResult optimize_xi(const DomainMask& mask, const GroundState& gs,
                            const ModelParams& params, const OptimizeOptions& opts) {
  const GridSpec& grid = mask.grid;
  const double h = grid.spacing();
  const double inner_dist = opts.delta / mask.eps;
  if (mask.max_interior_distance <= inner_dist)
    throw GeometryError("optimize_xi: Omega_{eps,delta} is empty; reduce delta");

  JCache cache(mask, gs, params, opts.contraction);

  // coarse lattice scan of J over Omega_{eps,delta}, plus the seed hint
  Point best;
  double bestJ = std::numeric_limits<double>::infinity();
  int failures = 0, attempts = 0;
  const auto try_candidate = [&](const Point& xi) {
    ++attempts;
    try {
      const double J = cache.at(xi).J_eps;
      if (J < bestJ) {
        bestJ = J;
        best = xi;
      }
    } catch (const ContractionFailureError&) {
      ++failures;
    }
  };
  if (opts.seed_hint && mask.distance_at(*opts.seed_hint) > inner_dist)
    try_candidate(*opts.seed_hint);
  for (Eigen::Index flat = 0; flat < grid.cell_count(); ++flat) {
    const auto idx = multi_index(grid, flat);
    bool on_lattice = true;
    for (int d = 0; d < grid.dim; ++d)
      if (idx[d] % opts.coarse_stride != 0) on_lattice = false;
    if (!on_lattice) continue;
    if (mask.signed_distance.values[flat] <= inner_dist) continue;
    try_candidate(cell_center(grid, flat));
  }
  if (attempts == 0)
    throw InsufficientDataError("optimize_xi: coarse stride leaves no candidates");
  if (!(bestJ < std::numeric_limits<double>::infinity()))
    throw ContractionFailureError("optimize_xi: contraction failed at every candidate", {});

  // Nelder-Mead refinement to simplex size h/4
  const int n = grid.dim;
  std::vector<Point> simplex;
  simplex.push_back(best);
  for (int d = 0; d < n; ++d) {
    Point v = best;
    v[d] += std::max(h, opts.coarse_stride * h / 4.0);
    simplex.push_back(v);
  }
  const auto feasible = [&](const Point& x) { return mask.distance_at(x) > inner_dist; };
  const auto evalJ = [&](const Point& x) -> double {
    if (!feasible(x)) return std::numeric_limits<double>::infinity();
    try {
      return cache.at(x).J_eps;
    } catch (const ContractionFailureError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::vector<double> f;
  for (const auto& v : simplex) f.push_back(evalJ(v));

  for (int it = 0; it < 120; ++it) {
    // sort vertices by value
    std::vector<int> order(simplex.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::vector<Point> sx;
    std::vector<double> sf;
    for (int i : order) {
      sx.push_back(simplex[i]);
      sf.push_back(f[i]);
    }
    simplex = sx;
    f = sf;

    double diam = 0.0;
    for (size_t i = 1; i < simplex.size(); ++i)
      diam = std::max(diam, (simplex[i] - simplex[0]).norm());
    if (diam <= h / 4.0) break;

    Point centroid = Point::Zero(n);
    for (size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Point worst = simplex.back();
    const Point refl = centroid + (centroid - worst);
    const double fr = evalJ(refl);
    if (fr < f[0]) {
      const Point expd = centroid + 2.0 * (centroid - worst);
      const double fe = evalJ(expd);
      if (fe < fr) {
        simplex.back() = expd;
        f.back() = fe;
      } else {
        simplex.back() = refl;
        f.back() = fr;
      }
    } else if (fr < f[f.size() - 2]) {
      simplex.back() = refl;
      f.back() = fr;
    } else {
      const Point contr = centroid + 0.5 * (worst - centroid);
      const double fc = evalJ(contr);
      if (fc < f.back()) {
        simplex.back() = contr;
        f.back() = fc;
      } else {
        for (size_t i = 1; i < simplex.size(); ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          f[i] = evalJ(simplex[i]);
        }
      }
    }
  }

  Point xi_star = simplex[0];

  // Newton polish on the multiplier map c(xi) = 0 (criticality equivalence);
  // finite-difference Jacobian with step h/2.
  if (opts.polish_criticality) {
    const double target = 0.5 * opts.multiplier_tol * gs.alpha;
    for (int it = 0; it < 4; ++it) {
      const Eigen::VectorXd c0 = cache.at(xi_star).c;
      if (c0.cwiseAbs().maxCoeff() <= target) break;
      const double step = 0.5 * h;
      Eigen::MatrixXd Jc(n, n);
      for (int d = 0; d < n; ++d) {
        Point xp = xi_star, xm = xi_star;
        xp[d] += step;
        xm[d] -= step;
        Jc.col(d) = (cache.at(xp).c - cache.at(xm).c) / (2.0 * step);
      }
      const Eigen::VectorXd dxi = Jc.fullPivLu().solve(-c0);
      Point next = xi_star;
      for (int d = 0; d < n; ++d) next[d] += dxi[d];
      if (!feasible(next)) break;
      xi_star = next;
    }
  }

  const ReductionResult result = cache.at(xi_star);

  if (mask.distance_at(xi_star) - inner_dist <= h)
    throw BoundaryMinimumError(
        "optimize_xi: minimizer sits on the collar of Omega_{eps,delta}; "
        "reduce delta or eps");
  if (result.c.cwiseAbs().maxCoeff() > opts.multiplier_tol * gs.alpha)
    throw CriticalityError("optimize_xi: multipliers fail the tolerance at the minimizer: max|c| = " +
                           std::to_string(result.c.cwiseAbs().maxCoeff()));
  return result;
}

VerificationReport assemble_and_verify(const ReductionResult& result, const ModelParams& params,
                                       const GroundState& gs, const DomainMask& mask,
                                       const ContractionOptions& copts,
                                       bool with_criticality_matrix) {
  const GridSpec& grid = mask.grid;
  const int n = grid.dim;
  const double h = grid.spacing();
  const SymbolSpec sym = SymbolSpec::mixed(params.s, 1.0);

  VerificationReport rep;
  const ScalarField w_xi = translate(gs.w, result.xi);
  rep.sup_error = (result.u.values - w_xi.values).abs().maxCoeff();

  const Eigen::ArrayXd res =
      apply_multiplier(result.u, sym).values - positive_power(result.u.values, params.p);
  const double unorm = std::sqrt(result.u.values.square().sum());
  rep.true_residual = std::sqrt((mask.interior * res.square()).sum()) / unorm;

  Eigen::ArrayXd czi = Eigen::ArrayXd::Zero(grid.cell_count());
  for (int i = 0; i < n; ++i) czi += result.c[i] * translate(gs.modes[i], result.xi).values;
  const double multiplier_norm = std::sqrt((mask.interior * czi.square()).sum()) / unorm;
  rep.residual_bound = 10.0 * (result.pde_residual + multiplier_norm);
  rep.residual_ok = rep.true_residual <= rep.residual_bound;

  double umin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < grid.cell_count(); ++i)
    if (mask.interior[i] > 0.0) umin = std::min(umin, result.u.values[i]);
  rep.u_min_interior = umin;
  rep.u_positive = umin > 0.0;

  // |dv/dxi| by central differences (Dirichlet re-solves at xi +- h e_j)
  double dv_sup = 0.0;
  for (int d = 0; d < n; ++d) {
    Point xp = result.xi, xm = result.xi;
    xp[d] += h;
    xm[d] -= h;
    const ReductionContext cp = ReductionContext::make(mask, gs, xp, copts.linear_tol);
    const ReductionContext cm = ReductionContext::make(mask, gs, xm, copts.linear_tol);
    dv_sup = std::max(dv_sup, ((cp.v.values - cm.v.values) / (2.0 * h)).abs().maxCoeff());
  }
  rep.dv_dxi_sup = dv_sup;
  rep.dv_dxi_normalized = dv_sup / std::pow(params.eps, params.decay_exponent());

  // M_ji = int Z_i du/dxi_j by central differences (full re-contractions)
  rep.M = Eigen::MatrixXd::Zero(n, n);
  if (!with_criticality_matrix) return rep;
  for (int j = 0; j < n; ++j) {
    Point xp = result.xi, xm = result.xi;
    xp[j] += h;
    xm[j] -= h;
    const ReductionContext ctxp = ReductionContext::make(mask, gs, xp, copts.linear_tol);
    const ReductionContext ctxm = ReductionContext::make(mask, gs, xm, copts.linear_tol);
    const ReductionResult rp = contract_psi_ctx(ctxp, params, copts);
    const ReductionResult rm = contract_psi_ctx(ctxm, params, copts);
    const Eigen::ArrayXd du = (rp.u.values - rm.u.values) / (2.0 * h);
    for (int i = 0; i < n; ++i) {
      const ScalarField Zi = translate(gs.modes[i], result.xi);
      rep.M(j, i) = grid.cell_volume() * (mask.interior * Zi.values * du).sum();
    }
  }
  rep.M_deviation =
      (rep.M + gs.alpha * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() / gs.alpha;
  return rep;
}

}  // namespace mlnl
