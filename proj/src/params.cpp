#include "mlnl/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mlnl {

std::pair<double, double> ModelParams::mu_window(int dim, double s, double p) {
  const double n = dim;
  const double lo = n / 2.0;
  const double hi = std::min(p * (n + 2.0 * s) - n / 2.0 - 2.0 * s, n + 2.0 * s);
  return {lo, hi};
}

ModelParams ModelParams::make(int dim, double s, double p, double eps,
                              std::optional<double> mu_opt) {
  if (dim < 1 || dim > 3) throw ConfigError("ModelParams: dim must be 1, 2 or 3");
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("ModelParams: s must lie in (0,1)");
  if (!(p > 1.0)) throw ConfigError("ModelParams: p must exceed 1");
  if (dim >= 3 && !(p < (dim + 2.0) / (dim - 2.0)))
    throw ConfigError("ModelParams: p must be subcritical, p < (n+2)/(n-2) for n >= 3");
  if (!(eps > 0.0)) throw ConfigError("ModelParams: eps must be positive");

  const auto [lo, hi] = mu_window(dim, s, p);
  if (!(lo < hi)) throw ConfigError("ModelParams: empty mu window");
  const double mu = mu_opt.value_or(0.5 * (lo + hi));
  if (!(mu > lo && mu < hi))
    throw ConfigError("ModelParams: mu = " + std::to_string(mu) + " outside window (" +
                      std::to_string(lo) + ", " + std::to_string(hi) + ")");

  const double n = dim;
  const double n2s = n + 2.0 * s;
  const double gamma1 = std::min(n2s, p * n2s - mu);
  const double q = std::min(1.0, p - 1.0);
  const double gamma = std::min(n2s - mu * std::max(0.0, 2.0 - p), q * gamma1);
  if (!(gamma1 > 0.0)) throw ConfigError("ModelParams: gamma1 must be positive");

  ModelParams out;
  out.dim = dim;
  out.s = s;
  out.p = p;
  out.eps = eps;
  out.mu = mu;
  out.gamma1 = gamma1;
  out.gamma = gamma;
  return out;
}

ModelParams ModelParams::with_eps(double new_eps) const {
  return ModelParams::make(dim, s, p, new_eps, mu);
}

}  // namespace mlnl
