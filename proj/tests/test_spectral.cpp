#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mlnl/quadrature.hpp>
#include <mlnl/spectral.hpp>

#include <cmath>
#include <random>

using namespace mlnl;

namespace {

// deterministic trig polynomial with modes below N/8; resamplable on any grid
ScalarField random_smooth_field(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 5);
  struct Term {
    double a;
    int m[3];
  };
  std::vector<Term> terms;
  for (int t = 0; t < 8; ++t) {
    Term term{amp(rng), {0, 0, 0}};
    for (int d = 0; d < g.dim; ++d) term.m[d] = mode(rng);
    terms.push_back(term);
  }
  const double k0 = M_PI / g.half_width;
  return sample(g, [&](const Point& x) {
    double v = 0.0;
    for (const auto& t : terms) {
      double phase = 0.0;
      for (int d = 0; d < g.dim; ++d) phase += k0 * t.m[d] * x[d];
      v += t.a * std::cos(phase);
    }
    return v;
  });
}

// second-order centered finite-difference -Laplacian on the periodic grid,
// the independent oracle for the spectral operator
ScalarField fd_neg_laplacian(const ScalarField& f) {
  const GridSpec& g = f.grid;
  const int N = g.points_per_axis;
  const double h2 = g.spacing() * g.spacing();
  ScalarField out = ScalarField::zero(g);
  for (Eigen::Index flat = 0; flat < g.cell_count(); ++flat) {
    const auto idx = multi_index(g, flat);
    double acc = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      auto up = idx, dn = idx;
      up[d] = (idx[d] + 1) % N;
      dn[d] = (idx[d] + N - 1) % N;
      acc += 2.0 * f.values[flat] - f.values[flat_index(g, up)] - f.values[flat_index(g, dn)];
    }
    out.values[flat] = acc / h2;
  }
  return out;
}

}  // namespace

TEST_CASE("multiplier is exact on a resolvable cosine mode") {
  const GridSpec g = GridSpec::make(2, 16.0, 64);
  const double k1 = M_PI / g.half_width;
  const ScalarField mode = sample(g, [&](const Point& x) { return std::cos(k1 * x[0]); });
  const SymbolSpec sym = SymbolSpec::mixed(0.5, 1.0);
  const double m = k1 * k1 + k1 + 1.0;  // s = 1/2: |k|^{2s} = |k|
  CHECK(sym.value(k1 * k1) == doctest::Approx(m).epsilon(1e-14));
  const ScalarField out = apply_multiplier(mode, sym);
  const double dev = (out.values - m * mode.values).abs().maxCoeff() / m;
  CHECK(dev <= 1e-12);
}

TEST_CASE("constant field is fixed by a unit-mass symbol") {
  const GridSpec g = GridSpec::make(2, 12.0, 32);
  const ScalarField one = ScalarField::constant(g, 1.0);
  for (double b : {1.0, 0.0}) {
    SymbolSpec sym = SymbolSpec::mixed(0.7, 1.0);
    sym.nonlocal_coeff = b;
    const ScalarField out = apply_multiplier(one, sym);
    CHECK((out.values - 1.0).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("spectral -Laplacian matches the finite-difference oracle at order >= 1.9") {
  const SymbolSpec lap{0.5, 1.0, 0.0, 0.0};
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const GridSpec g = GridSpec::make(2, 8.0, n);
    const ScalarField f = random_smooth_field(g, 7);
    const ScalarField spec_out = apply_multiplier(f, lap);
    const ScalarField fd_out = fd_neg_laplacian(f);
    errs.push_back((spec_out.values - fd_out.values).abs().maxCoeff());
  }
  // the FD operator converges to the (mode-exact) spectral one at O(h^2)
  CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("solve_multiplier inverts apply_multiplier") {
  const GridSpec g = GridSpec::make(2, 12.0, 64);
  const SymbolSpec sym = SymbolSpec::mixed(0.4, 1.0);
  const ScalarField f = random_smooth_field(g, 3);

  SUBCASE("constant right-hand side with unit mass") {
    const ScalarField out = solve_multiplier(ScalarField::constant(g, 1.0), sym);
    CHECK((out.values - 1.0).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("cosine mode is divided by its eigenvalue") {
    const double k1 = 2.0 * M_PI / g.half_width;
    const ScalarField mode = sample(g, [&](const Point& x) { return std::cos(k1 * x[1]); });
    const ScalarField out = solve_multiplier(mode, sym);
    const double m = sym.value(k1 * k1);
    CHECK((out.values - mode.values / m).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("round trip on a random smooth field") {
    const ScalarField back = solve_multiplier(apply_multiplier(f, sym), sym);
    const double rel =
        std::sqrt((back.values - f.values).square().sum() / f.values.square().sum());
    CHECK(rel <= 1e-10);
  }
  SUBCASE("zero mass is a singular symbol") {
    SymbolSpec singular = sym;
    singular.mass = 0.0;
    CHECK_THROWS_AS(solve_multiplier(f, singular), SingularSymbolError);
  }
}

TEST_CASE("discrete delta solve matches the synthesized fundamental field") {
  const GridSpec g = GridSpec::make(2, 12.0, 64);
  const SymbolSpec sym = SymbolSpec::mixed(0.5, 1.0);
  const int jc = g.points_per_axis / 2;
  ScalarField delta = ScalarField::zero(g);
  delta.values[flat_index(g, {jc, jc, 0})] = 1.0 / g.cell_volume();
  const ScalarField via_solve = solve_multiplier(delta, sym);
  const Point center = point2(g.coord(jc), g.coord(jc));
  const ScalarField via_synthesis = fundamental_field(g, sym, center);
  const double rel = std::sqrt((via_solve.values - via_synthesis.values).square().sum() /
                               via_synthesis.values.square().sum());
  CHECK(rel <= 1e-10);
}

TEST_CASE("non-finite input is rejected") {
  const GridSpec g = GridSpec::make(1, 12.0, 32);
  ScalarField f = ScalarField::zero(g);
  f.values[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(apply_multiplier(f, SymbolSpec::mixed(0.5, 1.0)), InvalidFieldError);
}

TEST_CASE("multiplier commutes with grid reflections and axis swaps") {
  const GridSpec g = GridSpec::make(2, 10.0, 64);
  const SymbolSpec sym = SymbolSpec::mixed(0.3, 0.5);
  for (unsigned seed : {11u, 12u, 13u}) {
    const ScalarField f = random_smooth_field(g, seed);
    const double scale = f.values.abs().maxCoeff();
    for (int axis : {0, 1}) {
      const ScalarField a = reflect(apply_multiplier(f, sym), axis);
      const ScalarField b = apply_multiplier(reflect(f, axis), sym);
      CHECK((a.values - b.values).abs().maxCoeff() <= 1e-12 * scale * 100);
    }
    const ScalarField a = permute_axes(apply_multiplier(f, sym), 0, 1);
    const ScalarField b = apply_multiplier(permute_axes(f, 0, 1), sym);
    CHECK((a.values - b.values).abs().maxCoeff() <= 1e-12 * scale * 100);
  }
}

TEST_CASE("translate") {
  const GridSpec g = GridSpec::make(2, 12.0, 64);
  const ScalarField f = random_smooth_field(g, 21);

  SUBCASE("zero shift is the identity") {
    const ScalarField out = translate(f, point2(0.0, 0.0));
    CHECK((out.values - f.values).abs().maxCoeff() <= 1e-12 * f.values.abs().maxCoeff());
  }
  SUBCASE("one-cell shift of a single mode is an exact phase shift") {
    const double k1 = M_PI / g.half_width;
    const ScalarField mode = sample(g, [&](const Point& x) { return std::cos(k1 * x[0]); });
    const ScalarField out = translate(mode, point2(g.spacing(), 0.0));
    const ScalarField expect =
        sample(g, [&](const Point& x) { return std::cos(k1 * (x[0] - g.spacing())); });
    CHECK((out.values - expect.values).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("translation round trip at a non-integer shift") {
    const Point shift = point2(0.37, -1.21);
    const ScalarField back = translate(translate(f, shift), -shift);
    const double rel =
        std::sqrt((back.values - f.values).square().sum() / f.values.square().sum());
    CHECK(rel <= 1e-10);
  }
  SUBCASE("shift beyond the margin is a geometry error") {
    CHECK_THROWS_AS(translate(f, point2(g.half_width - 0.5, 0.0)), GeometryError);
  }
}

TEST_CASE("spectral derivative of a mode and axis independence") {
  const GridSpec g = GridSpec::make(2, 12.0, 64);
  const double k1 = 2.0 * M_PI / g.half_width;
  const ScalarField mode = sample(g, [&](const Point& x) { return std::sin(k1 * x[0]); });
  const ScalarField d0 = derivative(mode, 0);
  const ScalarField expect = sample(g, [&](const Point& x) { return k1 * std::cos(k1 * x[0]); });
  CHECK((d0.values - expect.values).abs().maxCoeff() <= 1e-11);
  const ScalarField d1 = derivative(mode, 1);
  CHECK(d1.values.abs().maxCoeff() <= 1e-12);
}

TEST_CASE("quadratic form is symmetric and positive, 3d smoke") {
  const GridSpec g = GridSpec::make(3, 8.0, 16);
  const ScalarField f = random_smooth_field(g, 5);
  const SymbolSpec sym = SymbolSpec::mixed(0.5, 1.0);
  CHECK(quadratic_form(f, sym) > 0.0);
  const ScalarField f2 = random_smooth_field(g, 6);
  const double a = inner(apply_multiplier(f, sym), f2);
  const double b = inner(f, apply_multiplier(f2, sym));
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}
