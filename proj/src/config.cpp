#include "mlnl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace mlnl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    return std::stod(trim(s));
  } catch (...) {
    throw ConfigError("cannot parse value for '" + key + "': " + s);
  }
}

Point to_point(const std::vector<double>& v, int dim, const std::string& key) {
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("'" + key + "' needs " + std::to_string(dim) + " components");
  Point p(dim);
  for (int d = 0; d < dim; ++d) p[d] = v[d];
  return p;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not 'key = value'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  RunConfig cfg;
  const auto has = [&](const char* k) { return kv.count(k) > 0; };
  if (has("dim")) cfg.dim = static_cast<int>(parse_double(kv["dim"], "dim"));
  if (has("s")) cfg.s = parse_double(kv["s"], "s");
  if (has("p")) cfg.p = parse_double(kv["p"], "p");
  if (has("mu")) cfg.mu = parse_double(kv["mu"], "mu");
  if (has("L")) cfg.half_width = parse_double(kv["L"], "L");
  if (has("N")) cfg.points_per_axis = static_cast<int>(parse_double(kv["N"], "N"));

  Point center = Point::Zero(cfg.dim);
  if (has("center")) center = to_point(parse_list(kv["center"]), cfg.dim, "center");
  std::string shape = has("shape") ? kv["shape"] : "ball";
  if (shape == "ball") {
    const double radius = has("radius") ? parse_double(kv["radius"], "radius") : 1.0;
    cfg.domain = DomainSpec::ball(radius, center);
  } else if (shape == "ellipse") {
    if (!has("semi_axes")) throw ConfigError("shape = ellipse needs 'semi_axes'");
    cfg.domain = DomainSpec::ellipse(to_point(parse_list(kv["semi_axes"]), cfg.dim, "semi_axes"),
                                     center);
  } else if (shape == "rounded-rect") {
    if (!has("half_widths") || !has("corner_radius"))
      throw ConfigError("shape = rounded-rect needs 'half_widths' and 'corner_radius'");
    cfg.domain = DomainSpec::rounded_rect(
        to_point(parse_list(kv["half_widths"]), cfg.dim, "half_widths"),
        parse_double(kv["corner_radius"], "corner_radius"), center);
  } else {
    throw ConfigError("unknown shape '" + shape + "' (ball | ellipse | rounded-rect)");
  }

  if (has("eps")) cfg.eps_schedule = parse_list(kv["eps"]);
  if (has("delta")) cfg.delta = parse_double(kv["delta"], "delta");
  if (has("stride")) cfg.stride = static_cast<int>(parse_double(kv["stride"], "stride"));
  if (has("coarse_stride"))
    cfg.coarse_stride = static_cast<int>(parse_double(kv["coarse_stride"], "coarse_stride"));
  if (has("tol_solver")) cfg.tol.solver = parse_double(kv["tol_solver"], "tol_solver");
  if (has("tol_contraction"))
    cfg.tol.contraction = parse_double(kv["tol_contraction"], "tol_contraction");
  if (has("tol_multiplier"))
    cfg.tol.multiplier = parse_double(kv["tol_multiplier"], "tol_multiplier");
  if (has("tol_fit_residual"))
    cfg.tol.fit_residual = parse_double(kv["tol_fit_residual"], "tol_fit_residual");
  if (has("psi_bound_slack"))
    cfg.tol.psi_bound_slack = parse_double(kv["psi_bound_slack"], "psi_bound_slack");
  if (has("kernel_band_factor"))
    cfg.kernel_band_factor = parse_double(kv["kernel_band_factor"], "kernel_band_factor");
  if (has("output_dir")) cfg.output_dir = kv["output_dir"];
  if (has("seed")) cfg.seed = static_cast<unsigned>(parse_double(kv["seed"], "seed"));
  if (has("threads")) cfg.threads = static_cast<int>(parse_double(kv["threads"], "threads"));
  if (has("debug_negate_nonlocal")) {
    const std::string v = kv["debug_negate_nonlocal"];
    cfg.debug_negate_nonlocal = (v == "true" || v == "1" || v == "yes");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_env_overrides(RunConfig& config) {
  if (const char* dir = std::getenv("MLNL_OUTPUT_DIR")) config.output_dir = dir;
  if (const char* t = std::getenv("MLNL_THREADS")) {
    try {
      config.threads = std::stoi(t);
    } catch (...) {
      throw ConfigError("MLNL_THREADS is not an integer");
    }
  }
}

void validate_config(const RunConfig& config) {
  ModelParams::make(config.dim, config.s, config.p,
                    config.eps_schedule.empty() ? 0.1 : config.eps_schedule.front(), config.mu);
  GridSpec::make(config.dim, config.half_width, config.points_per_axis);
  if (config.eps_schedule.empty()) throw ConfigError("eps schedule is empty");
  for (size_t i = 0; i + 1 < config.eps_schedule.size(); ++i)
    if (!(config.eps_schedule[i] > config.eps_schedule[i + 1]))
      throw ConfigError("eps schedule must be strictly decreasing");
  for (double e : config.eps_schedule)
    if (!(e > 0.0)) throw ConfigError("eps values must be positive");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (config.stride < 1 || config.coarse_stride < 1)
    throw ConfigError("strides must be positive");
  if (!(config.tol.solver > 0.0) || !(config.tol.contraction > 0.0) ||
      !(config.tol.multiplier > 0.0) || !(config.tol.fit_residual > 0.0) ||
      !(config.kernel_band_factor > 0.0))
    throw ConfigError("all tolerances must be positive");
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  if (config.domain.dim() != config.dim) throw ConfigError("domain/model dimension mismatch");
}

}  // namespace mlnl
