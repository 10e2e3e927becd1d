#pragma once

#include <optional>
#include <vector>

#include "mlnl/decay.hpp"
#include "mlnl/params.hpp"
#include "mlnl/spectral.hpp"

namespace mlnl {

struct SpectrumEntry {
  double lambda = 0.0;
  double mode_correlation = 0.0;  // cosine similarity with span{Z_i}
};

/// The whole-space ground state w of -Delta w + (-Delta)^s w + w = w^p with
/// its translation modes, energy, and the bottom of the linearized spectrum.
struct GroundState {
  ModelParams params;
  ScalarField w;
  double energy = 0.0;    // I(w)
  double alpha = 0.0;     // \int Z_1^2
  std::vector<ScalarField> modes;
  double residual = 0.0;  // ||Aw - w^p||_2 / ||w||_2
  std::vector<SpectrumEntry> spectrum;
  int kernel_dimension = 0;
  double spectral_gap = 0.0;  // smallest eigenvalue above the kernel band
};

struct GroundStateOptions {
  int max_fixed_point = 400;
  int max_newton = 12;
  double target_residual = 1e-9;   // relative
  int ritz_pairs = 12;
  double kernel_band_factor = 1e-3;  // |lambda| <= factor * gap counts as kernel
  bool compute_spectrum = true;
  unsigned seed = 2024;
};

/// Two-phase solve: sup-normalized fixed point w <- solve_multiplier(w_+^p),
/// then Newton refinement on F(w) = Op w - w_+^p. Populates modes by spectral
/// differentiation, alpha and I(w) by quadrature, and the bottom eigenvalues
/// of the linearized operator by shift-invert Lanczos.
GroundState compute_ground_state(const ModelParams& params, const GridSpec& grid,
                                 std::optional<ScalarField> init = std::nullopt,
                                 const GroundStateOptions& opts = {});

struct ModeDecayReport {
  std::vector<DecayFit> mode_fits;      // |Z_i|
  std::vector<DecayFit> gradient_fits;  // |grad Z_i|
  std::vector<DecayFit> hessian_fits;   // |grad^2 Z_i|
  double first_pass_exponent = 0.0;     // n + 2s, the coarse lower-bound rate
};

/// Decay fits of the translation modes and their derivatives over the
/// annulus [3, L-3].
ModeDecayReport mode_decay_report(const GroundState& gs);

/// First radius at which the field stops being radially nonincreasing along
/// axis and diagonal rays from `center`, scanning r <= r_max with the given
/// slack. Returns +inf when monotone over the whole scanned range.
double radial_monotonicity_break(const ScalarField& field, const Point& center, double r_max,
                                 double slack = 1e-10);

}  // namespace mlnl
