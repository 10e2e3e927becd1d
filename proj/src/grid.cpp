#include "mlnl/grid.hpp"

#include <cmath>

namespace mlnl {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

GridSpec GridSpec::make(int dim, double half_width, int points_per_axis) {
  if (dim < 1 || dim > 3) throw GeometryError("GridSpec: dim must be 1, 2 or 3");
  if (!(half_width > 0.0)) throw GeometryError("GridSpec: half_width must be positive");
  if (!is_power_of_two(points_per_axis) || points_per_axis < 16)
    throw GeometryError("GridSpec: points_per_axis must be a power of two >= 16");
  return GridSpec{dim, half_width, points_per_axis};
}

double GridSpec::cell_volume() const {
  return std::pow(spacing(), dim);
}

Eigen::Index GridSpec::cell_count() const {
  Eigen::Index n = 1;
  for (int d = 0; d < dim; ++d) n *= points_per_axis;
  return n;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid)
    throw GeometryError("fields live on different grids and cannot be combined");
}

void require_finite(const ScalarField& f, const char* where) {
  if (!f.all_finite())
    throw InvalidFieldError(std::string(where) + ": field contains NaN or Inf");
}

Eigen::Index flat_index(const GridSpec& g, const std::array<int, 3>& idx) {
  Eigen::Index flat = 0;
  for (int d = 0; d < g.dim; ++d) flat = flat * g.points_per_axis + idx[d];
  return flat;
}

std::array<int, 3> multi_index(const GridSpec& g, Eigen::Index flat) {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = g.dim - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % g.points_per_axis);
    flat /= g.points_per_axis;
  }
  return idx;
}

Point cell_center(const GridSpec& g, Eigen::Index flat) {
  const auto idx = multi_index(g, flat);
  Point p(g.dim);
  for (int d = 0; d < g.dim; ++d) p[d] = g.coord(idx[d]);
  return p;
}

ScalarField sample(const GridSpec& g, const std::function<double(const Point&)>& f) {
  ScalarField out = ScalarField::zero(g);
  const int N = g.points_per_axis;
  Point p(g.dim);
  std::array<int, 3> idx{0, 0, 0};
  for (Eigen::Index flat = 0; flat < g.cell_count(); ++flat) {
    for (int d = 0; d < g.dim; ++d) p[d] = g.coord(idx[d]);
    out.values[flat] = f(p);
    for (int d = g.dim - 1; d >= 0; --d) {
      if (++idx[d] < N) break;
      idx[d] = 0;
    }
  }
  return out;
}

Eigen::ArrayXd radius_field(const GridSpec& g, const Point& center) {
  if (center.size() != g.dim) throw GeometryError("radius_field: center dimension mismatch");
  Eigen::ArrayXd r(g.cell_count());
  const int N = g.points_per_axis;
  std::array<int, 3> idx{0, 0, 0};
  for (Eigen::Index flat = 0; flat < g.cell_count(); ++flat) {
    double r2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const double dx = g.coord(idx[d]) - center[d];
      r2 += dx * dx;
    }
    r[flat] = std::sqrt(r2);
    for (int d = g.dim - 1; d >= 0; --d) {
      if (++idx[d] < N) break;
      idx[d] = 0;
    }
  }
  return r;
}

ScalarField reflect(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid.dim) throw GeometryError("reflect: axis out of range");
  const int N = f.grid.points_per_axis;
  ScalarField out = ScalarField::zero(f.grid);
  for (Eigen::Index flat = 0; flat < f.grid.cell_count(); ++flat) {
    auto idx = multi_index(f.grid, flat);
    idx[axis] = N - 1 - idx[axis];
    out.values[flat_index(f.grid, idx)] = f.values[flat];
  }
  return out;
}

ScalarField permute_axes(const ScalarField& f, int axis_a, int axis_b) {
  if (axis_a < 0 || axis_a >= f.grid.dim || axis_b < 0 || axis_b >= f.grid.dim)
    throw GeometryError("permute_axes: axis out of range");
  ScalarField out = ScalarField::zero(f.grid);
  for (Eigen::Index flat = 0; flat < f.grid.cell_count(); ++flat) {
    auto idx = multi_index(f.grid, flat);
    std::swap(idx[axis_a], idx[axis_b]);
    out.values[flat_index(f.grid, idx)] = f.values[flat];
  }
  return out;
}

}  // namespace mlnl
