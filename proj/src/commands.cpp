#include "mlnl/commands.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "mlnl/field_io.hpp"
#include "mlnl/quadrature.hpp"
#include "mlnl/reduction.hpp"

namespace mlnl {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string timestamp_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

bool ensure_output_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) return false;
  // probe writability
  const fs::path probe = fs::path(config.output_dir) / ".write_probe";
  std::ofstream os(probe);
  if (!os) return false;
  os.close();
  fs::remove(probe, ec);
  return true;
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

json params_json(const ModelParams& p) {
  return json{{"dim", p.dim},       {"s", p.s},   {"p", p.p},
              {"eps", p.eps},       {"mu", p.mu}, {"gamma1", p.gamma1},
              {"gamma", p.gamma}};
}

json fit_json(const DecayFit& f) {
  return json{{"exponent", f.exponent}, {"intercept", f.intercept},
              {"r_inner", f.r_inner},   {"r_outer", f.r_outer},
              {"residual", f.residual}, {"bins", f.bins},
              {"is_power_law", f.is_power_law}};
}

json point_json(const Point& x) {
  json a = json::array();
  for (int d = 0; d < x.size(); ++d) a.push_back(x[d]);
  return a;
}

Point grid_center_cell(const GridSpec& grid) {
  Point c(grid.dim);
  c.setConstant(0.5 * grid.spacing());
  return c;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

int cmd_ground_state(const RunConfig& config) {
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  if (!ensure_output_dir(config)) {
    std::fprintf(stderr, "cannot create or write output dir '%s'\n", config.output_dir.c_str());
    return kExitIo;
  }
  const GridSpec grid = config.grid();
  const ModelParams params = config.params(config.eps_schedule.front());

  GroundState gs;
  try {
    GroundStateOptions opts;
    opts.seed = config.seed;
    opts.kernel_band_factor = config.kernel_band_factor;
    gs = compute_ground_state(params, grid, std::nullopt, opts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ground-state solve failed: %s\n", e.what());
    return kExitSolverFailure;
  }

  json report;
  report["schema_version"] = 1;
  report["timestamp"] = timestamp_now();
  report["params"] = params_json(params);
  report["grid"] = {{"dim", grid.dim}, {"L", grid.half_width}, {"N", grid.points_per_axis}};
  report["residual"] = gs.residual;
  report["energy"] = gs.energy;
  report["alpha"] = gs.alpha;
  json spec = json::array();
  for (const auto& e : gs.spectrum)
    spec.push_back({{"lambda", e.lambda}, {"mode_correlation", e.mode_correlation}});
  report["spectrum"] = spec;
  report["kernel_dimension"] = gs.kernel_dimension;
  report["spectral_gap"] = gs.spectral_gap;

  try {
    const Point origin = Point::Zero(grid.dim);
    json fits;
    fits["w"] = fit_json(fit_decay(gs.w, origin, 3.0, grid.half_width - 3.0));
    const ModeDecayReport modes = mode_decay_report(gs);
    json mf = json::array(), gf = json::array(), hf = json::array();
    for (const auto& f : modes.mode_fits) mf.push_back(fit_json(f));
    for (const auto& f : modes.gradient_fits) gf.push_back(fit_json(f));
    for (const auto& f : modes.hessian_fits) hf.push_back(fit_json(f));
    fits["modes"] = mf;
    fits["mode_gradients"] = gf;
    fits["mode_hessians"] = hf;
    fits["first_pass_exponent"] = modes.first_pass_exponent;
    report["decay_fits"] = fits;

    const fs::path dir(config.output_dir);
    write_field(gs.w, (dir / "w.mlnf").string());
    for (int d = 0; d < grid.dim; ++d)
      write_field(gs.modes[d], (dir / ("mode_" + std::to_string(d + 1) + ".mlnf")).string());
    write_radial_profile_csv(gs.w, origin, 0.5, grid.half_width - 1.0, 64,
                             (dir / "w_profile.csv").string());
    write_json_file(report, dir / "ground_state.json");
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  }

  if (gs.kernel_dimension != grid.dim) {
    std::fprintf(stderr,
                 "kernel dimension mismatch: measured %d, expected %d (nondegeneracy fails)\n",
                 gs.kernel_dimension, grid.dim);
    return kExitKernelDimension;
  }
  std::printf("ground-state: residual %.3e, energy %.8f, alpha %.8f, kernel dim %d, gap %.4f\n",
              gs.residual, gs.energy, gs.alpha, gs.kernel_dimension, gs.spectral_gap);
  return kExitOk;
}

int cmd_fundamental(const RunConfig& config) {
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  if (!ensure_output_dir(config)) return kExitIo;
  const GridSpec grid = config.grid();
  const SymbolSpec sym = config.symbol();
  const Point center = grid_center_cell(grid);

  const ScalarField K = fundamental_field(grid, sym, center);
  const double mass = integrate(K);
  const double r_out = std::min(9.0, grid.half_width - 2.0);
  const DecayFit fit = fit_decay(K, center, 3.0, r_out, 24, config.tol.fit_residual);
  const double scan_radius = std::min(10.0, grid.half_width - 4.0);
  const double brk = radial_monotonicity_break(K, center, scan_radius);

  json report;
  report["schema_version"] = 1;
  report["timestamp"] = timestamp_now();
  report["symbol"] = {{"s", sym.s},
                      {"local_coeff", sym.local_coeff},
                      {"nonlocal_coeff", sym.nonlocal_coeff},
                      {"mass", sym.mass}};
  report["grid"] = {{"dim", grid.dim}, {"L", grid.half_width}, {"N", grid.points_per_axis}};
  report["mass_integral"] = mass;
  report["decay_fit"] = fit_json(fit);
  report["min_value"] = K.values.minCoeff();
  report["monotonicity_scan_radius"] = scan_radius;
  report["monotone"] = !std::isfinite(brk);

  try {
    const fs::path dir(config.output_dir);
    write_field(K, (dir / "K.mlnf").string());
    write_radial_profile_csv(K, center, 0.5, grid.half_width - 1.0, 64,
                             (dir / "K_profile.csv").string());
    write_json_file(report, dir / "fundamental.json");
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  }
  std::printf("fundamental: int K = %.6f, decay exponent %.4f, monotone %s\n", mass, fit.exponent,
              std::isfinite(brk) ? "no" : "yes");
  return kExitOk;
}

int cmd_landscape(const RunConfig& config) {
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  if (!ensure_output_dir(config)) return kExitIo;
  const GridSpec grid = config.grid();

  GroundState gs;
  try {
    GroundStateOptions gopts;
    gopts.seed = config.seed;
    gopts.kernel_band_factor = config.kernel_band_factor;
    gs = compute_ground_state(config.params(config.eps_schedule.front()), grid, std::nullopt,
                              gopts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ground-state solve failed: %s\n", e.what());
    return kExitSolverFailure;
  }
  if (gs.kernel_dimension != grid.dim) return kExitKernelDimension;

  json report;
  report["schema_version"] = 1;
  report["timestamp"] = timestamp_now();
  report["delta"] = config.delta;
  report["stride"] = config.stride;
  json entries = json::array();

  for (double eps : config.eps_schedule) {
    try {
      const DomainMask mask = make_mask(config.domain, eps, grid);
      const LandscapeScan scan =
          scan_landscape(mask, gs, config.delta, config.stride, config.tol.solver);

      char name[64];
      std::snprintf(name, sizeof(name), "mask_indicator_eps%g.mlnf", eps);
      write_field(ScalarField(grid, mask.interior), (fs::path(config.output_dir) / name).string());
      std::snprintf(name, sizeof(name), "mask_distance_eps%g.mlnf", eps);
      write_field(mask.signed_distance, (fs::path(config.output_dir) / name).string());
      std::snprintf(name, sizeof(name), "landscape_eps%g.csv", eps);
      const fs::path csv_path = fs::path(config.output_dir) / name;
      std::ofstream csv(csv_path);
      if (!csv) throw IoError("cannot write " + csv_path.string());
      for (int d = 0; d < grid.dim; ++d) csv << "xi_" << (d + 1) << ",";
      csv << "d,H_eps,J_eps,remainder\n";
      csv.precision(17);
      for (const auto& s : scan.samples) {
        for (int d = 0; d < grid.dim; ++d) csv << s.xi[d] << ",";
        csv << s.d << "," << s.H << ",";
        if (s.J) csv << *s.J;
        csv << "," << s.remainder << "\n";
      }

      // band constants of H * d^{n+4s} over the fit window
      const double expo = config.params(eps).energy_exponent();
      double band_lo = std::numeric_limits<double>::infinity(), band_hi = 0.0;
      const double d_hi = 0.8 * mask.max_interior_distance;
      for (const auto& s : scan.samples)
        if (s.d >= 2.0 && s.d <= d_hi) {
          const double c = s.H * std::pow(s.d, expo);
          band_lo = std::min(band_lo, c);
          band_hi = std::max(band_hi, c);
        }

      entries.push_back({{"eps", eps},
                         {"samples", static_cast<int>(scan.samples.size())},
                         {"fit", fit_json(scan.fit)},
                         {"interior_min", scan.interior_min},
                         {"collar_min", scan.collar_min},
                         {"interior_argmin", point_json(scan.interior_argmin)},
                         {"interior_below_collar", scan.interior_min < scan.collar_min},
                         {"band_lo", band_lo},
                         {"band_hi", band_hi},
                         {"csv", std::string(name)}});
      std::printf("landscape eps=%g: %zu samples, H~d^-%.3f, interior %.4e < collar %.4e: %s\n",
                  eps, scan.samples.size(), scan.fit.exponent, scan.interior_min, scan.collar_min,
                  scan.interior_min < scan.collar_min ? "yes" : "NO");
    } catch (const GeometryError& e) {
      std::fprintf(stderr, "landscape eps=%g: %s\n", eps, e.what());
      return kExitConfig;
    } catch (const InsufficientDataError& e) {
      std::fprintf(stderr, "landscape eps=%g: %s\n", eps, e.what());
      return kExitConfig;
    } catch (const IoError& e) {
      std::fprintf(stderr, "io error: %s\n", e.what());
      return kExitIo;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "landscape eps=%g failed: %s\n", eps, e.what());
      return kExitSolverFailure;
    }
  }
  report["entries"] = entries;
  try {
    write_json_file(report, fs::path(config.output_dir) / "landscape.json");
  } catch (const IoError&) {
    return kExitIo;
  }
  return kExitOk;
}

int cmd_reduce(const RunConfig& config) {
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  if (!ensure_output_dir(config)) return kExitIo;
  const GridSpec grid = config.grid();

  GroundState gs;
  try {
    GroundStateOptions gopts;
    gopts.seed = config.seed;
    gopts.kernel_band_factor = config.kernel_band_factor;
    gs = compute_ground_state(config.params(config.eps_schedule.front()), grid, std::nullopt,
                              gopts);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ground-state solve failed: %s\n", e.what());
    return kExitSolverFailure;
  }
  if (gs.kernel_dimension != grid.dim) {
    std::fprintf(stderr, "kernel dimension mismatch: %d vs %d\n", gs.kernel_dimension, grid.dim);
    return kExitKernelDimension;
  }

  struct PerEps {
    double eps;
    ReductionResult result;
    VerificationReport verify;
  };
  std::vector<PerEps> kept;
  std::vector<double> dropped;
  const double smallest = config.eps_schedule.back();

  for (double eps : config.eps_schedule) {
    const ModelParams params = config.params(eps);
    try {
      const DomainMask mask = make_mask(config.domain, eps, grid);
      OptimizeOptions oopts;
      oopts.coarse_stride = config.coarse_stride;
      oopts.delta = config.delta;
      oopts.multiplier_tol = config.tol.multiplier;
      oopts.contraction.tol = config.tol.contraction;
      oopts.contraction.linear_tol = config.tol.solver;
      // landscape seed: the H-scan argmin, when the scan is feasible at
      // this eps (needs delta/eps >= 2 + h for the collar solves)
      if (config.delta / eps - grid.spacing() >= 2.0) {
        const LandscapeScan seed = scan_landscape(
            mask, gs, config.delta, std::max(config.stride, 8), config.tol.solver);
        oopts.seed_hint = seed.interior_argmin;
      } else {
        std::fprintf(stderr,
                     "reduce eps=%g: landscape seed skipped (delta/eps below the "
                     "reduced-energy validity range)\n",
                     eps);
      }
      const ReductionResult result = optimize_xi(mask, gs, params, oopts);
      const bool full = eps == smallest;
      const VerificationReport verify =
          assemble_and_verify(result, params, gs, mask, oopts.contraction, full);
      kept.push_back({eps, result, verify});
      std::printf("reduce eps=%g: xi*=(%s), |c|max=%.3e, psi_w=%.4e, J=%.8f, sup_err=%.4e\n", eps,
                  point_json(result.xi).dump().c_str(), result.c.cwiseAbs().maxCoeff(),
                  result.psi_norm_weighted, result.J_eps, verify.sup_error);
    } catch (const ContractionFailureError& e) {
      std::fprintf(stderr, "reduce eps=%g dropped: %s\n", eps, e.what());
      dropped.push_back(eps);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "reduce eps=%g failed: %s\n", eps, e.what());
      return kExitSolverFailure;
    }
  }

  json report;
  report["schema_version"] = 1;
  report["timestamp"] = timestamp_now();
  report["gamma1_config"] = config.params(smallest).gamma1;
  report["dropped_eps"] = dropped;
  json per = json::array();
  for (const auto& k : kept) {
    json jm = json::array();
    for (int i = 0; i < k.verify.M.rows(); ++i)
      for (int j = 0; j < k.verify.M.cols(); ++j) jm.push_back(k.verify.M(i, j));
    json c = json::array();
    for (int i = 0; i < k.result.c.size(); ++i) c.push_back(k.result.c[i]);
    // Dirichlet solve report at the optimal point
    const DomainMask mask_k = make_mask(config.domain, k.eps, grid);
    const ReductionContext ctx_k =
        ReductionContext::make(mask_k, gs, k.result.xi, config.tol.solver);
    const json dirichlet = {{"residual", ctx_k.dirichlet_residual},
                            {"iterations", ctx_k.dirichlet_iterations},
                            {"min_interior_value", ctx_k.ubar_min_interior}};
    per.push_back({{"eps", k.eps},
                   {"dirichlet", dirichlet},
                   {"xi", point_json(k.result.xi)},
                   {"c", c},
                   {"psi_norm_weighted", k.result.psi_norm_weighted},
                   {"J_eps", k.result.J_eps},
                   {"pde_residual", k.result.pde_residual},
                   {"contraction_ratios", k.result.contraction_ratios},
                   {"sup_error", k.verify.sup_error},
                   {"true_residual", k.verify.true_residual},
                   {"residual_bound", k.verify.residual_bound},
                   {"u_positive", k.verify.u_positive},
                   {"dv_dxi_sup", k.verify.dv_dxi_sup},
                   {"dv_dxi_normalized", k.verify.dv_dxi_normalized},
                   {"M", jm},
                   {"M_deviation", k.verify.M_deviation}});
  }
  report["per_eps"] = per;

  // field files for the smallest kept eps
  try {
    if (!kept.empty()) {
      const auto& last = kept.back();
      const fs::path dir(config.output_dir);
      write_field(last.result.u, (dir / "u_eps.mlnf").string());
      write_field(last.result.psi, (dir / "psi.mlnf").string());
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  }

  json assertions;
  bool all_ok = true;
  const auto check = [&](const char* name, bool ok) {
    assertions[name] = ok;
    all_ok = all_ok && ok;
    std::printf("  [%s] %s\n", ok ? "pass" : "FAIL", name);
  };

  // per-eps assertions
  bool ratios_ok = true, positive_ok = true, resid_ok = true;
  for (const auto& k : kept) {
    for (size_t i = 1; i < k.result.contraction_ratios.size(); ++i)
      if (k.result.contraction_ratios[i] >= 1.0) ratios_ok = false;
    positive_ok = positive_ok && k.verify.u_positive;
    resid_ok = resid_ok && k.verify.residual_ok;
  }
  check("contraction ratios < 1 after iterate 2", ratios_ok);
  check("assembled solution positive on the interior", positive_ok);
  check("true-equation residual within the multiplier bound", resid_ok);

  if (config.eps_schedule.size() >= 3 && kept.size() < 3) {
    std::fprintf(stderr, "fewer than 3 eps values survived; scaling fits impossible\n");
    write_json_file(report, fs::path(config.output_dir) / "reduce.json");
    return kExitSolverFailure;
  }

  if (kept.size() >= 3) {
    std::vector<double> es, psin, supe, dv;
    for (const auto& k : kept) {
      es.push_back(k.eps);
      psin.push_back(k.result.psi_norm_weighted);
      supe.push_back(k.verify.sup_error);
      dv.push_back(k.verify.dv_dxi_sup);
    }
    const double gamma1 = config.params(smallest).gamma1;
    const double psi_slope = fitted_slope(es, psin);
    const double sup_slope = fitted_slope(es, supe);
    const double dv_slope = fitted_slope(es, dv);
    const double c_star = psin.front() / std::pow(es.front(), gamma1);
    bool cstar_ok = true;
    for (size_t i = 1; i < es.size(); ++i)
      if (psin[i] > config.tol.psi_bound_slack * c_star * std::pow(es[i], gamma1))
        cstar_ok = false;
    report["fits"] = {{"psi_slope", psi_slope},
                      {"sup_error_slope", sup_slope},
                      {"dv_dxi_slope", dv_slope},
                      {"c_star", c_star}};
    std::printf("reduce fits: psi slope %.3f (gamma1 %.2f), sup-error slope %.3f\n", psi_slope,
                gamma1, sup_slope);
    check("psi-norm slope within 0.3 of gamma1", std::abs(psi_slope - gamma1) <= 0.3);
    check("sup-error slope >= gamma1 - 0.3", sup_slope >= gamma1 - 0.3);
    check("psi norm within the calibrated C* bound", cstar_ok);
    check("criticality matrix within 10% of -alpha I at smallest eps",
          kept.back().verify.M_deviation <= 0.1);
  } else if (config.eps_schedule.size() < 3) {
    std::printf("schedule shorter than 3; scaling fits skipped\n");
  }

  report["assertions"] = assertions;
  try {
    write_json_file(report, fs::path(config.output_dir) / "reduce.json");
  } catch (const IoError&) {
    return kExitIo;
  }
  return all_ok ? kExitOk : kExitSolverFailure;
}

int cmd_verify(const RunConfig& config) {
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  if (!ensure_output_dir(config)) return kExitIo;

  const GridSpec grid = config.grid();
  const SymbolSpec sym = config.symbol();  // carries the debug fault if set
  const double eps = config.eps_schedule.front();
  const ModelParams params = config.params(eps);
  const double L = grid.half_width;

  struct Row {
    std::string name;
    bool pass;
    std::string detail;
  };
  std::vector<Row> rows;
  const auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    rows.push_back({name, pass, detail});
  };
  char buf[160];

  // multiplier exactness on a resolvable mode
  {
    const GridSpec g64 = GridSpec::make(grid.dim, L, 64);
    const double k1 = M_PI / L;
    ScalarField mode = sample(g64, [&](const Point& x) { return std::cos(k1 * x[0]); });
    const double m = sym.value(k1 * k1);
    const ScalarField out = apply_multiplier(mode, sym);
    const double dev = (out.values - m * mode.values).abs().maxCoeff() / std::abs(m);
    std::snprintf(buf, sizeof(buf), "max rel dev %.2e (tol 1e-12)", dev);
    add("multiplier exactness on resolvable modes", dev <= 1e-12, buf);
  }
  // inverse consistency
  {
    const GridSpec g64 = GridSpec::make(grid.dim, L, 64);
    std::mt19937 rng(config.seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    ScalarField f = ScalarField::zero(g64);
    for (int m = 1; m <= 4; ++m) {
      const double a = amp(rng), b = amp(rng);
      const double k = m * M_PI / L;
      f.values += sample(g64, [&](const Point& x) {
                    double phase = 0;
                    for (int d = 0; d < g64.dim; ++d) phase += k * x[d];
                    return a * std::cos(phase) + b * std::sin(phase);
                  }).values;
    }
    SymbolSpec invertible = sym;
    invertible.mass = 1.0;
    const ScalarField back = solve_multiplier(apply_multiplier(f, invertible), invertible);
    const double dev = std::sqrt((back.values - f.values).square().sum() /
                                 std::max(1e-300, f.values.square().sum()));
    std::snprintf(buf, sizeof(buf), "rel L2 dev %.2e (tol 1e-10)", dev);
    add("solve/apply inverse consistency", dev <= 1e-10, buf);
  }
  // quadrature
  {
    const GridSpec g64 = GridSpec::make(grid.dim, L, 64);
    const double vol = std::pow(2.0 * L, grid.dim);
    const double got = integrate(ScalarField::constant(g64, 1.0));
    const double dev = std::abs(got - vol) / vol;
    std::snprintf(buf, sizeof(buf), "rel dev %.2e (tol 1e-12)", dev);
    add("quadrature exact on constants", dev <= 1e-12, buf);
    const ScalarField odd =
        sample(g64, [](const Point& x) { return x[0] * std::exp(-x.squaredNorm()); });
    const double asym = std::abs(integrate(odd));
    std::snprintf(buf, sizeof(buf), "abs %.2e (tol 1e-12)", asym);
    add("quadrature kills antisymmetric integrands", asym <= 1e-12, buf);
  }
  // reflection commutation
  {
    const GridSpec g64 = GridSpec::make(grid.dim, L, 64);
    const ScalarField f =
        sample(g64, [](const Point& x) { return std::exp(-0.3 * (x.array() - 0.7).matrix().squaredNorm()); });
    const ScalarField a = reflect(apply_multiplier(f, sym), 0);
    const ScalarField b = apply_multiplier(reflect(f, 0), sym);
    const double dev = (a.values - b.values).abs().maxCoeff();
    std::snprintf(buf, sizeof(buf), "max dev %.2e (tol 1e-12 x scale)", dev);
    add("multiplier commutes with reflections", dev <= 1e-12 * f.values.abs().maxCoeff() * 100,
        buf);
  }
  // K positivity + monotonicity [max-principle suite]
  {
    const ScalarField K = fundamental_field(grid, sym, grid_center_cell(grid));
    const double kmin = K.values.minCoeff();
    std::snprintf(buf, sizeof(buf), "min K = %.3e", kmin);
    add("max-principle: fundamental solution positive", kmin > 0.0, buf);
    const double scan_radius = std::min(10.0, L - 6.0);
    const double brk = radial_monotonicity_break(K, grid_center_cell(grid), scan_radius);
    std::snprintf(buf, sizeof(buf), "first break at r = %.2f (scan to %.1f)",
                  std::isfinite(brk) ? brk : -1.0, scan_radius);
    add("max-principle: fundamental solution radially nonincreasing", !std::isfinite(brk), buf);
  }

  // rows below need the true ground state; solve it once without the spectrum
  GroundState gs;
  bool gs_ok = true;
  try {
    GroundStateOptions gopts;
    gopts.compute_spectrum = false;
    gopts.seed = config.seed;
    gs = compute_ground_state(params, grid, std::nullopt, gopts);
  } catch (const std::exception& e) {
    gs_ok = false;
    add("ground-state solve (prerequisite)", false, e.what());
  }

  if (gs_ok) {
    try {
      const DomainMask mask = make_mask(config.domain, eps, grid);
      // positive rhs keeps a positive solution
      {
        const ScalarField rhs = sample(grid, [](const Point& x) { return std::exp(-0.1 * x.squaredNorm()); });
        DirichletOptions dopts;
        dopts.tol = config.tol.solver;
        dopts.symbol = sym;
        const DirichletSolve sol = solve_dirichlet(rhs, mask, nullptr, dopts);
        std::snprintf(buf, sizeof(buf), "min interior %.3e", sol.min_interior_value);
        add("max-principle: positive rhs gives positive solution", sol.min_interior_value > 0.0,
            buf);
      }
      // ordering ubar < w and v > 0
      {
        const ScalarField w_xi = translate(gs.w, config.domain.center / eps);
        const ScalarField wp(grid, w_xi.values.max(0.0).pow(params.p));
        DirichletOptions dopts;
        dopts.tol = config.tol.solver;
        dopts.symbol = sym;
        const ScalarField guess(grid, mask.interior * w_xi.values);
        dopts.initial_guess = &guess;
        const DirichletSolve sol = solve_dirichlet(wp, mask, nullptr, dopts);
        const ScalarField v = deficiency_v(w_xi, sol.solution);
        const double vmin = v.values.minCoeff();
        std::snprintf(buf, sizeof(buf), "min v = %.3e", vmin);
        add("max-principle: deficiency v positive (ubar < w)", vmin > 0.0, buf);
      }
    } catch (const std::exception& e) {
      add("max-principle: Dirichlet rows", false, e.what());
    }

    // orthogonality
    if (grid.dim >= 2) {
      const double off = std::abs(inner(gs.modes[0], gs.modes[1]));
      const double diag = std::abs(inner(gs.modes[0], gs.modes[0]) -
                                   inner(gs.modes[1], gs.modes[1]));
      std::snprintf(buf, sizeof(buf), "|<Z1,Z2>| = %.2e, |a11-a22| = %.2e (tol 1e-6 alpha)", off,
                    diag);
      add("mode orthogonality <Z_i,Z_j> = alpha delta_ij",
          off <= 1e-6 * gs.alpha && diag <= 1e-6 * gs.alpha, buf);
    }
    // energy identity
    {
      const double rhs_val =
          (0.5 - 1.0 / (params.p + 1.0)) *
          integrate(ScalarField(grid, gs.w.values.max(0.0).pow(params.p + 1.0)));
      const double dev = std::abs(gs.energy - rhs_val) / std::abs(gs.energy);
      std::snprintf(buf, sizeof(buf), "rel dev %.2e (tol 1e-6)", dev);
      add("energy identity I(w) = (1/2 - 1/(p+1)) int w^{p+1}", dev <= 1e-6, buf);
    }
    // Pohozaev-style quadrature cross-check
    {
      const double lhs = quadratic_form(gs.w, SymbolSpec::mixed(params.s, 1.0));
      const double rhs_val = integrate(ScalarField(grid, gs.w.values.max(0.0).pow(params.p + 1.0)));
      const double dev = std::abs(lhs - rhs_val) / std::abs(rhs_val);
      std::snprintf(buf, sizeof(buf), "rel dev %.2e (tol 1e-6)", dev);
      add("quadrature cross-check int w Op w = int w^{p+1}", dev <= 1e-6, buf);
    }
  }

  int failed = 0;
  std::printf("%-60s  %s\n", "property", "result");
  for (const auto& r : rows) {
    std::printf("%-60s  %s  (%s)\n", r.name.c_str(), r.pass ? "pass" : "FAIL", r.detail.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu properties passed\n", static_cast<int>(rows.size()) - failed, rows.size());

  json report;
  report["schema_version"] = 1;
  report["timestamp"] = timestamp_now();
  report["debug_negate_nonlocal"] = config.debug_negate_nonlocal;
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  report["rows"] = jrows;
  report["failed"] = failed;
  try {
    write_json_file(report, fs::path(config.output_dir) / "verify.json");
  } catch (const IoError&) {
    return kExitIo;
  }
  return failed == 0 ? kExitOk : kExitSolverFailure;
}

}  // namespace mlnl
