#pragma once

#include <optional>
#include <vector>

#include "mlnl/energy.hpp"

namespace mlnl {

struct CriticalityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProjectedSolve {
  ScalarField psi;          // zero exterior, orthogonal to all Z_i
  Eigen::VectorXd c;        // multipliers
  double residual = 0.0;    // relative, bordered system
  double orthogonality_defect = 0.0;  // max_i |int psi Z_i| / alpha
  int iterations = 0;
};

/// Per-point working set for the reduction: the translated ground state and
/// modes, the approximate solution ubar and its deficiency.
struct ReductionContext {
  const DomainMask* mask = nullptr;
  const GroundState* gs = nullptr;
  Point xi;
  ScalarField w_xi;
  std::vector<ScalarField> Z;  // translation modes at xi
  ScalarField ubar;
  ScalarField v;               // w_xi - ubar
  double dirichlet_residual = 0.0;
  int dirichlet_iterations = 0;
  double ubar_min_interior = 0.0;

  static ReductionContext make(const DomainMask& mask, const GroundState& gs, const Point& xi,
                               double tol);
};

struct ReductionResult {
  Point xi;
  ScalarField psi;
  Eigen::VectorXd c;
  double psi_norm_weighted = 0.0;  // ||psi||_{inf,xi}
  double J_eps = 0.0;
  ScalarField u;                   // ubar + psi (rescaled solution)
  double pde_residual = 0.0;       // ||M(Op u - u^p - sum c_i Z_i)||_2 / ||u||_2
  int iterations = 0;
  std::vector<double> contraction_ratios;
};

/// Solves the bordered (saddle) linear problem
///   L psi - sum_i c_i Z_i = g on interior cells, psi = 0 outside,
///   int psi Z_j = 0,
/// with L = Op - p w_xi^{p-1}, by preconditioned GMRES on the symmetric
/// bordered operator.
ProjectedSolve solve_projected(const ScalarField& g, const DomainMask& mask,
                               const GroundState& gs, const Point& xi, double tol);
ProjectedSolve solve_projected(const ScalarField& g, const ReductionContext& ctx, double tol);

/// E(psi) = (ubar + psi)_+^p - w_xi^p - p w_xi^{p-1} psi on interior cells,
/// zero outside. Powers are taken on the positive part.
ScalarField nonlinear_error_E(const ScalarField& psi, const ScalarField& ubar,
                              const ScalarField& w_xi, double p, const DomainMask& mask);

struct ContractionOptions {
  int max_iter = 30;
  double tol = 1e-9;          // weighted-norm increment target
  double linear_tol = 1e-10;  // bordered-solve tolerance
  double ratio_slack = 1.05;  // allowed uptick of successive ratios
};

/// Fixed-point iteration psi_{k+1} = solve_projected(E(psi_k)) from psi = 0.
/// Throws ContractionFailureError when the ratios stop contracting.
ReductionResult contract_psi(const DomainMask& mask, const GroundState& gs, const Point& xi,
                             const ModelParams& params, int max_iter, double tol);
ReductionResult contract_psi_ctx(const ReductionContext& ctx, const ModelParams& params,
                                 const ContractionOptions& opts);

/// J_eps(xi) = I_eps(ubar_xi + Psi(xi)).
double reduced_J(const DomainMask& mask, const GroundState& gs, const Point& xi,
                 const ModelParams& params);

struct OptimizeOptions {
  int coarse_stride = 16;      // lattice stride (cells) for the J scan
  double delta = 0.25;         // Omega_{eps,delta} margin parameter
  double multiplier_tol = 1e-6;  // |c_i| <= multiplier_tol * alpha at the minimizer
  ContractionOptions contraction;
  bool polish_criticality = true;  // Newton on c(xi) = 0 after the simplex
  std::optional<Point> seed_hint;  // extra candidate, e.g. the H-scan argmin
};

/// Coarse scan of J_eps over Omega_{eps,delta} followed by Nelder-Mead
/// refinement to xi-tolerance h/4 (and an optional Newton polish on the
/// multiplier map). Asserts the minimizer is interior and |c| is below the
/// multiplier tolerance.
ReductionResult optimize_xi(const DomainMask& mask, const GroundState& gs,
                            const ModelParams& params, const OptimizeOptions& opts);

struct VerificationReport {
  double sup_error = 0.0;       // ||u - w_xi||_inf = ||psi - v_xi||_inf
  double true_residual = 0.0;   // c = 0 enforced: ||M(Op u - u^p)||_2 / ||u||_2
  double residual_bound = 0.0;  // 10 * (pde_residual + ||sum c_i Z_i||/||u||)
  bool residual_ok = false;
  double u_min_interior = 0.0;
  bool u_positive = false;
  double dv_dxi_sup = 0.0;         // finite-difference sup of |dv/dxi|
  double dv_dxi_normalized = 0.0;  // divided by eps^{n+2s}
  Eigen::MatrixXd M;               // M_ji = int Z_i du/dxi_j
  double M_deviation = 0.0;        // ||M + alpha I||_max / alpha
};

/// Recomputes the true equation residual at the assembled solution, the
/// sup-distance to the translated ground state, the criticality matrix M_ji
/// by central differences in xi, and the deficiency derivative bound.
/// `with_criticality_matrix = false` skips the 2n re-contractions for M_ji.
VerificationReport assemble_and_verify(const ReductionResult& result, const ModelParams& params,
                                       const GroundState& gs, const DomainMask& mask,
                                       const ContractionOptions& copts = {},
                                       bool with_criticality_matrix = true);

}  // namespace mlnl
