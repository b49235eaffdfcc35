#ifndef LDDFLOW_CLI_HPP
#define LDDFLOW_CLI_HPP

#include <iosfwd>
#include <string>

#include "lddflow/config.hpp"
#include "lddflow/schemes.hpp"

namespace lddflow {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 2,
  exit_divergence = 3,
  exit_solver_failure = 4,
};

/// Options coming from the command line rather than the config file.
struct CliOptions {
  std::string out_dir = ".";
  bool dump_matrices = false;
  int threads = 1;
};

/// A validated run setup built from a config file.
struct RunSetup {
  GridSpec grid_spec;
  DecomposedGrid grid;
  Problem problem;
  RunConfig run;
};

/// Builds grid, problem and run configuration from a parsed config,
/// validating every referenced parameter before any compute starts.
/// Throws ConfigError on invalid input.
RunSetup build_setup(const ConfigFile& cfg, const CliOptions& options);

int cmd_run(const ConfigFile& cfg, const CliOptions& options, std::ostream& log);
int cmd_sweep(const ConfigFile& cfg, const CliOptions& options, std::ostream& log);
int cmd_compare(const ConfigFile& cfg, const CliOptions& options, std::ostream& log);
int cmd_tau_bound(const ConfigFile& cfg, const CliOptions& options, std::ostream& log);

}  // namespace lddflow

#endif
