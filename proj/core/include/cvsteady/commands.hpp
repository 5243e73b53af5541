#pragma once

// Subcommands of the `cvsteady` tool. Each takes a parsed configuration and
// returns the complete output document (JSON or CSV) so that nothing is
// written until the computation has succeeded.

#include <exception>
#include <string>
#include <string_view>

#include "cvsteady/config.hpp"

namespace cvsteady::app {

std::string_view version();

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNotStable = 3,
  kExitUnphysicalBath = 4,
  kExitNoConvergence = 5,
};

int exit_code_for(const std::exception& e);

/// Single rotating-frame steady state as JSON.
std::string cmd_steady(const config::RunConfig& c);
/// One CSV row per grid point, rotating or lab frame.
std::string cmd_sweep(const config::RunConfig& c);
/// Critical temperature per (r, J) grid point as CSV.
std::string cmd_tc(const config::RunConfig& c);
/// Laboratory-frame periodic steady state as JSON.
std::string cmd_labframe(const config::RunConfig& c);
/// Monte Carlo comparison report as JSON.
std::string cmd_oracle(const config::RunConfig& c);

std::string run(config::Mode mode, const config::RunConfig& c);

/// Writes `content` to `path` through a temporary file and a rename, so the
/// destination is either complete or untouched.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace cvsteady::app
