#include "mlnl/domain.hpp"

#include <cmath>

namespace mlnl {

DomainSpec DomainSpec::ball(double radius, const Point& center) {
  if (!(radius > 0.0)) throw GeometryError("ball: radius must be positive");
  DomainSpec d;
  d.kind = ShapeKind::Ball;
  d.radius = radius;
  d.center = center;
  return d;
}

DomainSpec DomainSpec::ellipse(const Point& semi_axes, const Point& center) {
  if (center.size() != 2 || semi_axes.size() != 2)
    throw GeometryError("ellipse: only the 2-D ellipse is supported");
  if (!(semi_axes.minCoeff() > 0.0)) throw GeometryError("ellipse: semi-axes must be positive");
  DomainSpec d;
  d.kind = ShapeKind::Ellipse;
  d.semi_axes = semi_axes;
  d.center = center;
  return d;
}

DomainSpec DomainSpec::rounded_rect(const Point& half_widths, double corner_radius,
                                    const Point& center) {
  if (half_widths.size() != center.size())
    throw GeometryError("rounded_rect: dimension mismatch");
  if (!(corner_radius > 0.0))
    throw GeometryError("rounded_rect: corner radius must be positive (C^2 boundary)");
  if (!(half_widths.minCoeff() > corner_radius))
    throw GeometryError("rounded_rect: corner radius exceeds a half width");
  DomainSpec d;
  d.kind = ShapeKind::RoundedRect;
  d.half_widths = half_widths;
  d.corner_radius = corner_radius;
  d.center = center;
  return d;
}

namespace {

// Distance from a point in the closed first quadrant to the ellipse
// x^2/a^2 + y^2/b^2 = 1, via the standard root of
//   F(t) = (a u / (t + a^2))^2 + (b v / (t + b^2))^2 - 1
// on t in (-min(a,b)^2, inf), F monotone decreasing.
double ellipse_boundary_distance(double a, double b, double u, double v) {
  const double tiny = 1e-14 * std::max(a, b);
  if (v < tiny) {
    // on the major axis (a >= b handled by caller orientation not required here)
    const double crit = (a * a - b * b) / a;
    if (a >= b && u < crit) {
      const double x = a * a * u / (a * a - b * b);
      const double y = b * std::sqrt(std::max(0.0, 1.0 - (x / a) * (x / a)));
      return std::hypot(x - u, y - v);
    }
    return std::abs(u - a);
  }
  if (u < tiny) {
    const double crit = (b * b - a * a) / b;
    if (b >= a && v < crit) {
      const double y = b * b * v / (b * b - a * a);
      const double x = a * std::sqrt(std::max(0.0, 1.0 - (y / b) * (y / b)));
      return std::hypot(x - u, y - v);
    }
    return std::abs(v - b);
  }
  const double tmin = -std::min(a, b) * std::min(a, b);
  double lo = tmin + 1e-300;
  double hi = std::max({a * u, b * v, 1.0});
  auto F = [&](double t) {
    const double fx = a * u / (t + a * a);
    const double fy = b * v / (t + b * b);
    return fx * fx + fy * fy - 1.0;
  };
  while (F(hi) > 0.0) hi *= 2.0;
  // bisection to machine precision; ~110 halvings suffice for doubles
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (F(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  const double x = a * a * u / (t + a * a);
  const double y = b * b * v / (t + b * b);
  return std::hypot(x - u, y - v);
}

}  // namespace

double DomainSpec::signed_distance(const Point& x) const {
  switch (kind) {
    case ShapeKind::Ball:
      return radius - (x - center).norm();
    case ShapeKind::Ellipse: {
      const double a = semi_axes[0];
      const double b = semi_axes[1];
      const double u = std::abs(x[0] - center[0]);
      const double v = std::abs(x[1] - center[1]);
      const double d = ellipse_boundary_distance(a, b, u, v);
      const double level = (u / a) * (u / a) + (v / b) * (v / b);
      return level < 1.0 ? d : -d;
    }
    case ShapeKind::RoundedRect: {
      // exact SDF of the rounded box, sign flipped to positive-inside
      const int n = dim();
      double out2 = 0.0;
      double inside = -std::numeric_limits<double>::infinity();
      for (int d = 0; d < n; ++d) {
        const double q = std::abs(x[d] - center[d]) - (half_widths[d] - corner_radius);
        out2 += std::max(q, 0.0) * std::max(q, 0.0);
        inside = std::max(inside, q);
      }
      const double sdf = std::sqrt(out2) + std::min(inside, 0.0) - corner_radius;
      return -sdf;
    }
  }
  throw GeometryError("signed_distance: unknown shape");
}

Point DomainSpec::extent() const {
  Point e(dim());
  switch (kind) {
    case ShapeKind::Ball:
      e.setConstant(radius);
      break;
    case ShapeKind::Ellipse:
      e = semi_axes;
      break;
    case ShapeKind::RoundedRect:
      e = half_widths;
      break;
  }
  return e;
}

DomainMask make_mask(const DomainSpec& domain, double eps, const GridSpec& grid) {
  if (domain.dim() != grid.dim) throw GeometryError("make_mask: domain/grid dimension mismatch");
  if (!(eps > 0.0)) throw GeometryError("make_mask: eps must be positive");
  const Point ext = domain.extent();
  for (int d = 0; d < grid.dim; ++d) {
    const double reach = (std::abs(domain.center[d]) + ext[d]) / eps;
    if (reach > grid.half_width - 2.0)
      throw GeometryError(
          "make_mask: scaled domain does not fit the box with margin 2; "
          "increase half_width L or eps");
  }

  DomainMask mask;
  mask.grid = grid;
  mask.domain = domain;
  mask.eps = eps;
  mask.signed_distance = sample(grid, [&](const Point& x) {
    Point px = x * eps;
    return domain.signed_distance(px) / eps;
  });
  mask.interior = (mask.signed_distance.values > 0.0).cast<double>();
  mask.interior_count = static_cast<Eigen::Index>(mask.interior.sum());
  mask.max_interior_distance = mask.signed_distance.values.maxCoeff();
  if (mask.interior_count == 0)
    throw GeometryError("make_mask: discretized domain has no interior cells");
  return mask;
}

}  // namespace mlnl
