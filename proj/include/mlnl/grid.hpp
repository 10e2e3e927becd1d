#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>

#include "mlnl/errors.hpp"

namespace mlnl {

/// A point in 1-3 dimensions (stack-allocated, size = grid dimension).
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline Point point1(double x) { Point p(1); p << x; return p; }
inline Point point2(double x, double y) { Point p(2); p << x, y; return p; }
inline Point point3(double x, double y, double z) { Point p(3); p << x, y, z; return p; }

/// Uniform tensor grid on the periodic box [-L, L]^dim, sampled at cell
/// centers x_j = -L + (j + 1/2) h with h = 2L/N.
struct GridSpec {
  int dim = 0;
  double half_width = 0.0;
  int points_per_axis = 0;

  static GridSpec make(int dim, double half_width, int points_per_axis);

  double spacing() const { return 2.0 * half_width / points_per_axis; }
  double cell_volume() const;
  Eigen::Index cell_count() const;

  double coord(int j) const { return -half_width + (j + 0.5) * spacing(); }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && half_width == o.half_width && points_per_axis == o.points_per_axis;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

/// A sampled real function on a GridSpec; values in row-major axis order
/// (axis 0 slowest). The universal value type of the library.
struct ScalarField {
  GridSpec grid;
  Eigen::ArrayXd values;

  ScalarField() = default;
  ScalarField(const GridSpec& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.cell_count())
      throw InvalidFieldError("ScalarField: value count does not match grid");
  }

  static ScalarField zero(const GridSpec& g) {
    return ScalarField(g, Eigen::ArrayXd::Zero(g.cell_count()));
  }
  static ScalarField constant(const GridSpec& g, double v) {
    return ScalarField(g, Eigen::ArrayXd::Constant(g.cell_count(), v));
  }

  bool all_finite() const { return values.allFinite(); }
};

void require_same_grid(const ScalarField& a, const ScalarField& b);
void require_finite(const ScalarField& f, const char* where);

/// Multi-index <-> flat index helpers (row-major, axis 0 slowest).
Eigen::Index flat_index(const GridSpec& g, const std::array<int, 3>& idx);
std::array<int, 3> multi_index(const GridSpec& g, Eigen::Index flat);
Point cell_center(const GridSpec& g, Eigen::Index flat);

/// Samples f at every cell center.
ScalarField sample(const GridSpec& g, const std::function<double(const Point&)>& f);

/// |x - center| at every cell center.
Eigen::ArrayXd radius_field(const GridSpec& g, const Point& center);

/// Reflects the field through the box center (j -> N-1-j on the given axis,
/// i.e. x -> -x on that axis). Used by symmetry property checks.
ScalarField reflect(const ScalarField& f, int axis);

/// Swaps two axes (square grids only).
ScalarField permute_axes(const ScalarField& f, int axis_a, int axis_b);

}  // namespace mlnl
