#pragma once

#include <optional>

#include "mlnl/errors.hpp"

namespace mlnl {

/// Problem parameters (n, s, p, eps) plus the derived exponents that govern
/// the weighted norm and the convergence rates:
///   mu     in (n/2, min{p(n+2s) - n/2 - 2s, n+2s}), default midpoint;
///   gamma1 = min{n+2s, p(n+2s) - mu};
///   gamma  = min{n+2s - mu*(2-p)_+, q*gamma1},  q = min{1, p-1}.
struct ModelParams {
  int dim = 2;
  double s = 0.5;
  double p = 2.0;
  double eps = 0.1;
  double mu = 0.0;
  double gamma1 = 0.0;
  double gamma = 0.0;

  static ModelParams make(int dim, double s, double p, double eps,
                          std::optional<double> mu = std::nullopt);

  /// Admissible (lo, hi) window for the weight exponent mu.
  static std::pair<double, double> mu_window(int dim, double s, double p);

  double decay_exponent() const { return dim + 2.0 * s; }       // n + 2s
  double energy_exponent() const { return dim + 4.0 * s; }      // n + 4s

  ModelParams with_eps(double new_eps) const;
};

}  // namespace mlnl
