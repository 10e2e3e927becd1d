#pragma once

#include <string>
#include <vector>

#include "mlnl/grid.hpp"

namespace mlnl {

/// Result of a log-log power-law fit value ~ C * r^{-exponent}.
/// `exponent` is reported positive for decaying data.
struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  int bins = 0;
  bool is_power_law = false;
};

/// RMS residual above which a profile is flagged non-power-law.
constexpr double kPowerLawResidualThreshold = 0.1;

/// Least-squares fit of log(y) against log(x); y floored at 1e-300.
DecayFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                       double threshold = kPowerLawResidualThreshold);

/// Shell-averaged radial bins of |field| around `center`, equal width in
/// log r over [r_inner, r_outer]. Returns (r, mean |value|) pairs; empty
/// bins are skipped.
std::vector<std::pair<double, double>> radial_profile(const ScalarField& field,
                                                      const Point& center, double r_inner,
                                                      double r_outer, int bins);

/// Fits the decay exponent of |field| over the annulus [r_inner, r_outer].
/// Requires the annulus inside the box and at least 8 populated bins.
DecayFit fit_decay(const ScalarField& field, const Point& center, double r_inner, double r_outer,
                   int bins = 24, double threshold = kPowerLawResidualThreshold);

/// CSV with header "r,value".
void write_radial_profile_csv(const ScalarField& field, const Point& center, double r_inner,
                              double r_outer, int bins, const std::string& path);

}  // namespace mlnl
