// Command-line front end: ground-state, fundamental, landscape, reduce,
// verify subcommands over a shared key = value configuration file.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "mlnl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mlnl: concentrating solutions of the mixed local/nonlocal equation "
               "-eps^2 Lap u + eps^{2s} (-Lap)^s u + u = u^p at desk scale"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string eps_override;
  int threads = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file (key = value)");
    cmd->add_option("--output", output_dir, "output directory (overrides config)");
    cmd->add_option("--eps-override", eps_override, "comma list replacing the eps schedule");
    cmd->add_option("--threads", threads, "worker pool size");
  };

  auto* c_gs = app.add_subcommand("ground-state", "solve the whole-space ground state");
  auto* c_fund = app.add_subcommand("fundamental", "compute the fundamental solution K");
  auto* c_land = app.add_subcommand("landscape", "scan the reduced energy H_eps over xi");
  auto* c_red = app.add_subcommand("reduce", "full Lyapunov-Schmidt pipeline per eps");
  auto* c_ver = app.add_subcommand("verify", "run the invariant property suite");
  for (auto* c : {c_gs, c_fund, c_land, c_red, c_ver}) add_common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return e.get_exit_code() == 0 ? mlnl::kExitOk : mlnl::kExitConfig;
  }

  mlnl::RunConfig config;
  try {
    if (!config_path.empty()) config = mlnl::parse_config_file(config_path);
    mlnl::apply_env_overrides(config);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (threads > 0) config.threads = threads;
    if (!eps_override.empty()) {
      mlnl::RunConfig tmp = mlnl::parse_config_text("eps = " + eps_override);
      config.eps_schedule = tmp.eps_schedule;
    }
  } catch (const mlnl::IoError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return mlnl::kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return mlnl::kExitConfig;
  }

  try {
    if (c_gs->parsed()) return mlnl::cmd_ground_state(config);
    if (c_fund->parsed()) return mlnl::cmd_fundamental(config);
    if (c_land->parsed()) return mlnl::cmd_landscape(config);
    if (c_red->parsed()) return mlnl::cmd_reduce(config);
    if (c_ver->parsed()) return mlnl::cmd_verify(config);
  } catch (const mlnl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return mlnl::kExitConfig;
  } catch (const mlnl::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return mlnl::kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return mlnl::kExitSolverFailure;
  }
  return mlnl::kExitConfig;
}
