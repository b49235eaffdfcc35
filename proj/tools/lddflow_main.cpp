#include <iostream>

#include <CLI11.hpp>

#include "lddflow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume solver for saturated/unsaturated flow in a two-subdomain "
               "porous medium: monolithic L-scheme, Picard and Newton iterations plus a "
               "linearized domain-decomposition scheme with Robin coupling"};
  app.require_subcommand(1);

  std::string config_path;
  lddflow::CliOptions options;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", options.out_dir, "output directory (default: current)");
    cmd->add_option("--threads", options.threads, "worker threads for the subdomain solves");
    cmd->add_flag("--dump-matrices", options.dump_matrices,
                  "write every assembled system in coordinate format");
  };

  CLI::App* run = app.add_subcommand("run", "single transient run, CSV output");
  CLI::App* sweep = app.add_subcommand("sweep", "contraction-rate sweep over lambda/L/tau/dx");
  CLI::App* compare = app.add_subcommand("compare", "run several schemes on the same case");
  CLI::App* tau_bound = app.add_subcommand("tau-bound", "print the sufficient time-step bound");
  for (CLI::App* cmd : {run, sweep, compare, tau_bound}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    const lddflow::ConfigFile cfg = lddflow::ConfigFile::parse_file(config_path);
    if (run->parsed()) return lddflow::cmd_run(cfg, options, std::cout);
    if (sweep->parsed()) return lddflow::cmd_sweep(cfg, options, std::cout);
    if (compare->parsed()) return lddflow::cmd_compare(cfg, options, std::cout);
    if (tau_bound->parsed()) return lddflow::cmd_tau_bound(cfg, options, std::cout);
  } catch (const lddflow::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return lddflow::exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lddflow::exit_solver_failure;
  }
  return lddflow::exit_config_error;
}
