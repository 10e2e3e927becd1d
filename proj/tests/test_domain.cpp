#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mlnl/dirichlet.hpp>
#include <mlnl/quadrature.hpp>

#include <cmath>

using namespace mlnl;

TEST_CASE("ball mask geometry") {
  const GridSpec g = GridSpec::make(2, 16.0, 256);
  const DomainMask mask = make_mask(DomainSpec::ball(1.0, Point::Zero(2)), 0.1, g);
  // interior radius 10, max signed distance 10 within h
  CHECK(std::abs(mask.max_interior_distance - 10.0) <= g.spacing());
  // classification convention: inside iff signed distance > 0
  for (Eigen::Index i = 0; i < g.cell_count(); i += 37)
    CHECK((mask.interior[i] > 0.0) == (mask.signed_distance.values[i] > 0.0));
  // volume against the analytic ball volume, within 2% at N = 256
  const double vol = integrate(ScalarField(g, mask.interior));
  CHECK(std::abs(vol - 100.0 * M_PI) <= 0.02 * 100.0 * M_PI);
}

TEST_CASE("overflowing domain is rejected with guidance") {
  const GridSpec g = GridSpec::make(2, 16.0, 64);
  CHECK_THROWS_AS(make_mask(DomainSpec::ball(1.0, Point::Zero(2)), 0.05, g), GeometryError);
}

TEST_CASE("a cell center exactly on the boundary is exterior") {
  // 1-d setup with power-of-two arithmetic so the signed distance at the
  // cell x = 0.375 is exactly zero
  const GridSpec g = GridSpec::make(1, 8.0, 64);  // h = 0.25
  const double eps = 0.25;
  const double radius = eps * 0.375;  // scaled interior radius exactly 0.375
  const DomainMask mask = make_mask(DomainSpec::ball(radius, point1(0.0)), eps, g);
  const int jb = 33;  // x = 0.375, on the boundary
  CHECK(mask.signed_distance.values[jb] == 0.0);
  CHECK(mask.interior[jb] == 0.0);
  const int ji = 32;  // x = 0.125, strictly inside
  CHECK(mask.interior[ji] == 1.0);
}

TEST_CASE("ellipse signed distance against a boundary-sampling oracle") {
  const Point c = Point::Zero(2);
  const DomainSpec ell = DomainSpec::ellipse(point2(2.0, 1.0), c);
  // brute force: distance to densely sampled boundary points
  const auto oracle = [&](const Point& x) {
    double best = 1e300;
    for (int k = 0; k < 20000; ++k) {
      const double t = 2.0 * M_PI * k / 20000;
      const double dx = x[0] - 2.0 * std::cos(t);
      const double dy = x[1] - std::sin(t);
      best = std::min(best, std::hypot(dx, dy));
    }
    const double level = x[0] * x[0] / 4.0 + x[1] * x[1];
    return level < 1.0 ? best : -best;
  };
  for (const Point& x : {point2(0.3, 0.2), point2(1.5, 0.0), point2(0.0, 0.5),
                         point2(2.5, 0.1), point2(1.2, 1.2), point2(-1.7, -0.4)}) {
    CHECK(ell.signed_distance(x) == doctest::Approx(oracle(x)).epsilon(1e-4));
  }
  CHECK(ell.max_interior_distance() == doctest::Approx(1.0));
}

TEST_CASE("rounded rectangle signed distance") {
  const DomainSpec rr = DomainSpec::rounded_rect(point2(1.0, 0.8), 0.2, Point::Zero(2));
  CHECK(rr.signed_distance(Point::Zero(2)) == doctest::Approx(0.8));
  CHECK(rr.signed_distance(point2(1.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rr.signed_distance(point2(1.5, 0.0)) == doctest::Approx(-0.5));
  // corner: nearest point on the rounded arc
  const double corner = rr.signed_distance(point2(1.0, 0.8));
  CHECK(corner == doctest::Approx(0.2 - std::hypot(0.2, 0.2)));
  // C^2 requires a positive corner radius, and the radius must fit
  CHECK_THROWS_AS(DomainSpec::rounded_rect(point2(1.0, 0.8), 0.0, Point::Zero(2)),
                  GeometryError);
  CHECK_THROWS_AS(DomainSpec::rounded_rect(point2(1.0, 0.8), 0.9, Point::Zero(2)),
                  GeometryError);
}

TEST_CASE("solve_dirichlet basics") {
  const GridSpec g = GridSpec::make(2, 12.0, 128);
  const DomainMask mask = make_mask(DomainSpec::ball(1.0, Point::Zero(2)), 0.15, g);
  DirichletOptions opts;
  opts.tol = 1e-10;

  SUBCASE("zero rhs gives the zero solution") {
    const DirichletSolve sol = solve_dirichlet(ScalarField::zero(g), mask, nullptr, opts);
    CHECK(sol.solution.values.abs().maxCoeff() == 0.0);
    CHECK(sol.iterations == 0);
  }
  SUBCASE("exterior is exactly zero and positive rhs stays positive") {
    const ScalarField rhs =
        sample(g, [](const Point& x) { return std::exp(-0.5 * x.squaredNorm()); });
    DirichletOptions checked = opts;
    checked.check_positivity = true;
    const DirichletSolve sol = solve_dirichlet(rhs, mask, nullptr, checked);
    for (Eigen::Index i = 0; i < g.cell_count(); i += 11)
      if (mask.interior[i] == 0.0) CHECK(sol.solution.values[i] == 0.0);
    CHECK(sol.min_interior_value > 0.0);
    CHECK(sol.residual <= opts.tol);
  }
  SUBCASE("maximum-principle guard trips on a negated operator") {
    const ScalarField rhs =
        sample(g, [](const Point& x) { return std::exp(-0.1 * x.squaredNorm()); });
    DirichletOptions faulted = opts;
    faulted.check_positivity = true;
    faulted.symbol.nonlocal_coeff = -1.0;
    CHECK_THROWS_AS(solve_dirichlet(rhs, mask, nullptr, faulted), MaximumPrincipleError);
  }
}

TEST_CASE("weighted norm") {
  const GridSpec g = GridSpec::make(2, 12.0, 64);
  const Point xi = point2(0.4, -0.3);
  SUBCASE("reciprocal weight evaluates to one at grid points") {
    const ScalarField f = sample(g, [&](const Point& x) {
      return std::pow(1.0 + (x - xi).norm(), -2.0);
    });
    CHECK(weighted_norm(f, xi, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero field") { CHECK(weighted_norm(ScalarField::zero(g), xi, 2.0) == 0.0); }
  SUBCASE("algebraically decaying field has finite weighted norm") {
    const ScalarField f = sample(g, [&](const Point& x) {
      return std::pow(1.0 + (x - xi).norm(), -3.0);
    });
    const double norm = weighted_norm(f, xi, 2.0);
    CHECK(norm <= 1.0 + 1e-12);
    CHECK(norm > 0.0);
  }
}

TEST_CASE("barrier tail estimate decreases with the margin") {
  const GridSpec g = GridSpec::make(2, 16.0, 256);
  const DomainMask mask = make_mask(DomainSpec::ball(1.0, Point::Zero(2)), 0.1, g);
  const double a = barrier_tail_estimate(mask, point2(0.0, 0.0), 0.5);
  const double b = barrier_tail_estimate(mask, point2(4.0, 0.0), 0.5);
  CHECK(a < b);
  CHECK(a == doctest::Approx(std::pow(16.0, -4.0)));
}
