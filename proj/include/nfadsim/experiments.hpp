#pragma once

#include "nfadsim/config.hpp"

#include <iosfwd>
#include <string>

namespace nfadsim {

/// Exit codes reported by run_experiment and the CLI.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kConfigParseError = 2,
  kUnknownPreset = 3,
  kInvalidParameter = 4,
  kIoError = 5
};

/// Runs the experiment described by `config` (already merged from file and
/// command line). Writes one CSV per experiment plus a manifest holding
/// every resolved parameter into the configured output directory; rerunning
/// from the manifest reproduces the CSV byte for byte. Returns an ExitCode
/// and logs human-readable progress to `log`.
int run_experiment(const ConfigFile& config, std::ostream& log);

} // namespace nfadsim
