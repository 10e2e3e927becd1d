#pragma once

#include <vector>

#include "mlnl/grid.hpp"

namespace mlnl {

/// Fourier symbol m(k) = a|k|^2 + b|k|^{2s} + c of the operator
/// a(-Delta) + b(-Delta)^s + c on the periodic box. The rescaled mixed
/// operator of the model is a = b = c = 1; the shifted comparison operator
/// uses c = 1/2.
struct SymbolSpec {
  double s = 0.5;
  double local_coeff = 1.0;
  double nonlocal_coeff = 1.0;
  double mass = 1.0;

  double value(double k_squared) const;
  void validate() const;

  static SymbolSpec mixed(double s, double mass = 1.0) { return SymbolSpec{s, 1.0, 1.0, mass}; }
};

/// Applies the Fourier multiplier m(k) to the field. Exact on every
/// resolvable mode of the grid.
ScalarField apply_multiplier(const ScalarField& field, const SymbolSpec& sym);

/// Divides the spectrum by m(k); requires mass > 0 so that m(0) > 0.
ScalarField solve_multiplier(const ScalarField& rhs, const SymbolSpec& sym);

/// g(x) = f(x - shift), spectral phase shift, non-integer shifts allowed.
/// Requires the shift target to stay inside the box with margin >= 1.
ScalarField translate(const ScalarField& field, const Point& shift);

/// Spectral partial derivative along one axis (Nyquist mode zeroed).
ScalarField derivative(const ScalarField& field, int axis);

std::vector<ScalarField> gradient(const ScalarField& field);

/// |grad f| pointwise.
ScalarField gradient_magnitude(const ScalarField& field);

/// Frobenius norm of the spectral Hessian pointwise.
ScalarField hessian_magnitude(const ScalarField& field);

/// Synthesizes the periodized fundamental solution of the symbol, centered
/// at an arbitrary point: inverse transform of e^{-ik.center}/m(k). Agrees
/// with solve_multiplier applied to a discrete delta when center is a cell
/// center.
ScalarField fundamental_field(const GridSpec& grid, const SymbolSpec& sym, const Point& center);

/// integrate(u * Op u) with Op the symbol's operator; discrete Parseval form.
double quadratic_form(const ScalarField& u, const SymbolSpec& sym);

}  // namespace mlnl
