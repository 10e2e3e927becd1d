#include "mlnl/krylov.hpp"

#include <cmath>

namespace mlnl {

namespace {
void finish(KrylovStats* stats, int iters, double rel, bool ok, const KrylovOptions& opts,
            const char* method) {
  if (stats) {
    stats->iterations = iters;
    stats->residual = rel;
    stats->converged = ok;
  }
  if (!ok && opts.throw_on_divergence)
    throw SolverDivergenceError(std::string(method) + " did not converge within " +
                                    std::to_string(opts.max_iter) + " iterations",
                                rel, iters);
}
}  // namespace

Eigen::VectorXd conjugate_gradient(const VecOp& op, const Eigen::VectorXd& rhs,
                                   const KrylovOptions& opts, KrylovStats* stats) {
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    finish(stats, 0, 0.0, true, opts, "cg");
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd x =
      opts.initial_guess ? *opts.initial_guess : Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs - op(x);
  double rel = r.norm() / bnorm;
  if (rel <= opts.tol) {
    finish(stats, 0, rel, true, opts, "cg");
    return x;
  }
  Eigen::VectorXd z = opts.preconditioner ? opts.preconditioner(r) : r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd Ap = op(p);
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    rel = r.norm() / bnorm;
    if (rel <= opts.tol) {
      finish(stats, it, rel, true, opts, "cg");
      return x;
    }
    z = opts.preconditioner ? opts.preconditioner(r) : r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  finish(stats, opts.max_iter, rel, false, opts, "cg");
  return x;
}

Eigen::VectorXd gmres(const VecOp& op, const Eigen::VectorXd& rhs, const KrylovOptions& opts,
                      KrylovStats* stats) {
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    finish(stats, 0, 0.0, true, opts, "gmres");
    return Eigen::VectorXd::Zero(rhs.size());
  }
  const auto precond = [&](const Eigen::VectorXd& v) {
    return opts.preconditioner ? opts.preconditioner(v) : v;
  };
  Eigen::VectorXd x =
      opts.initial_guess ? *opts.initial_guess : Eigen::VectorXd::Zero(rhs.size());
  int total_iters = 0;
  double rel = 0.0;
  const int m = std::max(2, opts.restart);

  while (true) {
    Eigen::VectorXd r = rhs - op(x);
    double beta = r.norm();
    rel = beta / bnorm;
    if (rel <= opts.tol) {
      finish(stats, total_iters, rel, true, opts, "gmres");
      return x;
    }
    if (total_iters >= opts.max_iter) break;

    std::vector<Eigen::VectorXd> V;
    V.reserve(m + 1);
    V.push_back(r / beta);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g[0] = beta;

    int k = 0;
    for (; k < m && total_iters < opts.max_iter; ++k, ++total_iters) {
      Eigen::VectorXd w = op(precond(V[k]));
      for (int j = 0; j <= k; ++j) {
        H(j, k) = w.dot(V[j]);
        w -= H(j, k) * V[j];
      }
      const double hsub = w.norm();
      H(k + 1, k) = hsub;
      if (hsub > 0.0) V.push_back(w / hsub);

      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H(j, k) + sn[j] * H(j + 1, k);
        H(j + 1, k) = -sn[j] * H(j, k) + cs[j] * H(j + 1, k);
        H(j, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = H(k, k) / denom;
      sn[k] = H(k + 1, k) / denom;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      rel = std::abs(g[k + 1]) / bnorm;
      if (rel <= opts.tol || hsub == 0.0) {  // converged or lucky breakdown
        ++k;
        ++total_iters;
        break;
      }
    }

    Eigen::VectorXd y = H.topLeftCorner(k, k)
                            .triangularView<Eigen::Upper>()
                            .solve(g.head(k));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(rhs.size());
    for (int j = 0; j < k; ++j) update += y[j] * V[j];
    x += precond(update);
    if (rel <= opts.tol) {
      // recompute true residual once; restart if rounding drifted
      const double true_rel = (rhs - op(x)).norm() / bnorm;
      if (true_rel <= opts.tol * 4.0) {
        finish(stats, total_iters, true_rel, true, opts, "gmres");
        return x;
      }
    }
    if (total_iters >= opts.max_iter) break;
  }
  rel = (rhs - op(x)).norm() / bnorm;
  finish(stats, total_iters, rel, rel <= opts.tol, opts, "gmres");
  return x;
}

ScalarField krylov_solve(const FieldOp& op, const ScalarField& rhs, double tol, int max_iter,
                         KrylovStats* stats, const FieldOp& preconditioner,
                         bool symmetric_positive) {
  require_finite(rhs, "krylov_solve");
  if (!(tol > 0.0)) throw PreconditionError("krylov_solve: tol must be positive");
  const GridSpec grid = rhs.grid;
  const auto wrap = [grid](FieldOp f) -> VecOp {
    return [grid, f = std::move(f)](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      ScalarField in(grid, v.array());
      return f(in).values.matrix();
    };
  };
  KrylovOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  VecOp vop = wrap(op);
  if (preconditioner) opts.preconditioner = wrap(preconditioner);
  const Eigen::VectorXd b = rhs.values.matrix();
  Eigen::VectorXd x = symmetric_positive ? conjugate_gradient(vop, b, opts, stats)
                                         : gmres(vop, b, opts, stats);
  return ScalarField(grid, x.array());
}

}  // namespace mlnl
