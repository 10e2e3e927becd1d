#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mlnl/ground_state.hpp>
#include <mlnl/quadrature.hpp>

#include <cmath>

using namespace mlnl;

namespace {

// one shared solve per binary: n=2, s=1/2, p=2 on a 128^2 box of half-width 12
const GroundState& fixture() {
  static const GroundState gs = [] {
    const ModelParams params = ModelParams::make(2, 0.5, 2.0, 0.1);
    const GridSpec grid = GridSpec::make(2, 12.0, 128);
    return compute_ground_state(params, grid);
  }();
  return gs;
}

}  // namespace

TEST_CASE("ground state solves the equation to the target residual") {
  const GroundState& gs = fixture();
  CHECK(gs.residual <= 1e-8);
  CHECK(gs.w.values.maxCoeff() > 0.0);
  CHECK(gs.w.all_finite());
}

TEST_CASE("w is positive and radially nonincreasing") {
  const GroundState& gs = fixture();
  CHECK(gs.w.values.minCoeff() > 0.0);
  const double brk =
      radial_monotonicity_break(gs.w, Point::Zero(2), gs.w.grid.half_width - 0.5);
  CHECK(!std::isfinite(brk));
}

TEST_CASE("energy identity I(w) = (1/2 - 1/(p+1)) int w^{p+1}") {
  const GroundState& gs = fixture();
  const double p = gs.params.p;
  const double rhs = (0.5 - 1.0 / (p + 1.0)) *
                     integrate(ScalarField(gs.w.grid, gs.w.values.pow(p + 1.0)));
  CHECK(std::abs(gs.energy - rhs) <= 1e-6 * std::abs(gs.energy));
}

TEST_CASE("quadrature cross-check: int w Op w = int w^{p+1}") {
  const GroundState& gs = fixture();
  const double lhs = quadratic_form(gs.w, SymbolSpec::mixed(gs.params.s, 1.0));
  const double rhs = integrate(ScalarField(gs.w.grid, gs.w.values.pow(gs.params.p + 1.0)));
  CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));
}

TEST_CASE("translation modes are orthogonal with common norm alpha") {
  const GroundState& gs = fixture();
  CHECK(gs.alpha > 0.0);
  const double g11 = inner(gs.modes[0], gs.modes[0]);
  const double g22 = inner(gs.modes[1], gs.modes[1]);
  const double g12 = inner(gs.modes[0], gs.modes[1]);
  CHECK(std::abs(g11 - gs.alpha) <= 1e-12 * gs.alpha);
  CHECK(std::abs(g22 - gs.alpha) <= 1e-6 * gs.alpha);
  CHECK(std::abs(g12) <= 1e-8 * gs.alpha);
}

TEST_CASE("modes are odd through the origin") {
  const GroundState& gs = fixture();
  for (const auto& Z : gs.modes) {
    const ScalarField r0 = reflect(reflect(Z, 0), 1);  // x -> -x on the cell-centered grid
    CHECK((Z.values + r0.values).abs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("decay of w matches n + 2s within 0.2") {
  const GroundState& gs = fixture();
  const DecayFit fit = fit_decay(gs.w, Point::Zero(2), 3.0, 9.0);
  CHECK(std::abs(fit.exponent - 3.0) <= 0.2);
}

TEST_CASE("mode decay report") {
  const GroundState& gs = fixture();
  const ModeDecayReport rep = mode_decay_report(gs);
  CHECK(rep.first_pass_exponent == doctest::Approx(3.0));
  for (int i = 0; i < 2; ++i) {
    // the coarse bound is n+2s; the improved bound n+2s+1 should be visible
    CHECK(rep.mode_fits[i].exponent >= 3.0 - 0.2);
    CHECK(rep.mode_fits[i].exponent >= 3.5);  // consistent with the improved rate 4
    CHECK(rep.gradient_fits[i].exponent >= 3.0 - 0.2);
    CHECK(rep.hessian_fits[i].exponent >= 3.0 - 0.2);
  }
}

TEST_CASE("linearized spectrum: kernel dimension n, clean gap, mode correlation") {
  const GroundState& gs = fixture();
  REQUIRE(!gs.spectrum.empty());
  CHECK(gs.kernel_dimension == 2);
  CHECK(gs.spectral_gap >= 0.1);
  int near_zero = 0;
  for (const auto& e : gs.spectrum) {
    if (std::abs(e.lambda) <= 1e-3 * gs.spectral_gap) {
      ++near_zero;
      CHECK(e.mode_correlation >= 0.99);
    }
  }
  CHECK(near_zero == 2);
  // the bottom eigenvalue is strictly negative (mountain-pass ground state)
  CHECK(gs.spectrum.front().lambda < 0.0);
}

TEST_CASE("coarse grids are rejected") {
  const ModelParams params = ModelParams::make(2, 0.5, 2.0, 0.1);
  const GridSpec coarse = GridSpec::make(2, 16.0, 64);  // h = 0.5 > 0.25
  CHECK_THROWS_AS(compute_ground_state(params, coarse), PreconditionError);
}

TEST_CASE("zero initial field fails loudly") {
  const ModelParams params = ModelParams::make(2, 0.5, 2.0, 0.1);
  const GridSpec grid = GridSpec::make(2, 12.0, 128);
  GroundStateOptions opts;
  opts.compute_spectrum = false;
  CHECK_THROWS_AS(
      compute_ground_state(params, grid, ScalarField::zero(grid), opts), GroundStateError);
}

TEST_CASE("1d smoke test") {
  const ModelParams params = ModelParams::make(1, 0.5, 2.0, 0.1);
  const GridSpec grid = GridSpec::make(1, 12.0, 128);
  GroundStateOptions opts;
  opts.compute_spectrum = false;
  const GroundState gs = compute_ground_state(params, grid, std::nullopt, opts);
  CHECK(gs.residual <= 1e-8);
  CHECK(gs.w.values.minCoeff() > 0.0);
}
