#pragma once

#include "mlnl/grid.hpp"
#include "mlnl/params.hpp"

namespace mlnl {

enum class ShapeKind { Ball, Ellipse, RoundedRect };

/// Physical domain Omega with a C^2 boundary and an analytically known
/// signed distance (positive inside).
struct DomainSpec {
  ShapeKind kind = ShapeKind::Ball;
  Point center;
  double radius = 1.0;       // ball
  Point semi_axes;           // ellipse (2-D)
  Point half_widths;         // rounded rectangle
  double corner_radius = 0.0;

  static DomainSpec ball(double radius, const Point& center);
  static DomainSpec ellipse(const Point& semi_axes, const Point& center);
  static DomainSpec rounded_rect(const Point& half_widths, double corner_radius,
                                 const Point& center);

  int dim() const { return static_cast<int>(center.size()); }
  double signed_distance(const Point& x) const;
  /// Axis-aligned half-extent along each axis (for the fit-in-box check).
  Point extent() const;
  /// d0 = max over Omega of dist(., boundary); the incenter distance.
  double max_interior_distance() const { return signed_distance(center); }
};

/// Discretized Omega_eps = Omega/eps on a grid: interior classification and
/// signed distance at cell centers. Cells with signed distance <= 0 are
/// exterior (no cut cells).
struct DomainMask {
  GridSpec grid;
  DomainSpec domain;
  double eps = 0.0;
  ScalarField signed_distance;  // of Omega_eps, rescaled units
  Eigen::ArrayXd interior;      // 1.0 inside, 0.0 outside
  Eigen::Index interior_count = 0;
  double max_interior_distance = 0.0;  // over cell centers

  /// Analytic signed distance of Omega_eps at an arbitrary point.
  double distance_at(const Point& x) const {
    Point px = x * eps;
    return domain.signed_distance(px) / eps;
  }
};

/// Classifies cell centers of the grid against Omega/eps. The scaled domain
/// must fit in the box with margin >= 2 rescaled units.
DomainMask make_mask(const DomainSpec& domain, double eps, const GridSpec& grid);

inline DomainMask make_mask(const DomainSpec& domain, const ModelParams& params,
                            const GridSpec& grid) {
  return make_mask(domain, params.eps, grid);
}

}  // namespace mlnl
