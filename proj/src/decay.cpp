#include "mlnl/decay.hpp"

#include <cmath>
#include <fstream>

namespace mlnl {

DecayFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                       double threshold) {
  if (x.size() != y.size() || x.size() < 2)
    throw InsufficientDataError("fit_power_law: need at least 2 samples");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(std::abs(y[i]), 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(std::abs(y[i]), 1e-300));
    const double e = ly - (icept + slope * lx);
    ss += e * e;
  }
  DecayFit fit;
  fit.exponent = -slope;
  fit.intercept = icept;
  fit.r_inner = x.front();
  fit.r_outer = x.back();
  fit.residual = std::sqrt(ss / n);
  fit.bins = n;
  fit.is_power_law = fit.residual <= threshold;
  return fit;
}

std::vector<std::pair<double, double>> radial_profile(const ScalarField& field,
                                                      const Point& center, double r_inner,
                                                      double r_outer, int bins) {
  const Eigen::ArrayXd r = radius_field(field.grid, center);
  const double lo = std::log(r_inner);
  const double hi = std::log(r_outer);
  std::vector<double> sum(bins, 0.0);
  std::vector<long> count(bins, 0);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r[i] < r_inner || r[i] > r_outer) continue;
    int b = static_cast<int>((std::log(r[i]) - lo) / (hi - lo) * bins);
    b = std::min(std::max(b, 0), bins - 1);
    sum[b] += std::abs(field.values[i]);
    count[b] += 1;
  }
  std::vector<std::pair<double, double>> profile;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const double rc = std::exp(lo + (b + 0.5) * (hi - lo) / bins);
    profile.emplace_back(rc, sum[b] / count[b]);
  }
  return profile;
}

DecayFit fit_decay(const ScalarField& field, const Point& center, double r_inner, double r_outer,
                   int bins, double threshold) {
  require_finite(field, "fit_decay");
  if (!(r_inner > 0.0) || !(r_outer > r_inner))
    throw GeometryError("fit_decay: need 0 < r_inner < r_outer");
  double margin = field.grid.half_width;
  for (int d = 0; d < field.grid.dim; ++d)
    margin = std::min(margin, field.grid.half_width - std::abs(center[d]));
  if (r_outer >= margin)
    throw GeometryError("fit_decay: annulus exits the box");
  auto profile = radial_profile(field, center, r_inner, r_outer, bins);
  if (profile.size() < 8)
    throw InsufficientDataError("fit_decay: fewer than 8 populated radial bins");
  std::vector<double> xs, ys;
  xs.reserve(profile.size());
  ys.reserve(profile.size());
  for (auto& [rc, v] : profile) {
    xs.push_back(rc);
    ys.push_back(v);
  }
  DecayFit fit = fit_power_law(xs, ys, threshold);
  fit.r_inner = r_inner;
  fit.r_outer = r_outer;
  return fit;
}

void write_radial_profile_csv(const ScalarField& field, const Point& center, double r_inner,
                              double r_outer, int bins, const std::string& path) {
  auto profile = radial_profile(field, center, r_inner, r_outer, bins);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "r,value\n";
  os.precision(17);
  for (auto& [r, v] : profile) os << r << "," << v << "\n";
}

}  // namespace mlnl
