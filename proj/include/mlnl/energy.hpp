#pragma once

#include <optional>
#include <vector>

#include "mlnl/decay.hpp"
#include "mlnl/dirichlet.hpp"
#include "mlnl/ground_state.hpp"

namespace mlnl {

struct EnergyReport {
  double I_eps = 0.0;      // functional value at ubar_xi
  double I_w = 0.0;        // whole-space ground-state energy
  double H_eps = 0.0;      // reduced energy \int w^p v over the interior
  double remainder = 0.0;  // I_eps - I_w - H_eps/2
  double d = 0.0;          // dist(xi, boundary of Omega_eps)
  double eps = 0.0;
  // Next-order terms of the expansion, each o(eps^{n+4s}):
  double A1 = 0.0;         // \int_{exterior} w^{p+1}
  double A2_excess = 0.0;  // \int_Omega (w^{p+1}-ubar^{p+1})/(p+1) - H_eps
  int solve_iterations = 0;
};

/// I_eps(u) = 1/2 [ \int |grad u|^2 + \int u (-Delta)^s u + \int u^2 ]
///            - 1/(p+1) \int_Omega u_+^{p+1},
/// quadratic part evaluated spectrally on the full box (valid since u has
/// zero exterior). Throws if u is not identically zero outside.
double energy_I_eps(const ScalarField& u, const DomainMask& mask, const ModelParams& params);

/// Solves for ubar_xi, forms v_xi and fills the full report including the
/// expansion remainder. Requires dist(xi, boundary) >= 2.
EnergyReport reduced_energy_H(const DomainMask& mask, const Point& xi, const GroundState& gs,
                              double tol);

struct LandscapeSample {
  Point xi;
  double H = 0.0;
  std::optional<double> J;
  double d = 0.0;
  double remainder = 0.0;  // expansion remainder of the EnergyReport at xi
  bool collar = false;
};

struct LandscapeScan {
  std::vector<LandscapeSample> samples;
  DecayFit fit;             // H vs d over d in [2, 0.8 d_max]
  double interior_min = 0.0;
  double collar_min = 0.0;
  Point interior_argmin;
};

/// Evaluates H_eps on the strided interior lattice of Omega_{eps,delta} and
/// on a one-cell collar of its boundary.
LandscapeScan scan_landscape(const DomainMask& mask, const GroundState& gs, double delta,
                             int stride, double tol = 1e-10);

}  // namespace mlnl
