#pragma once

#include <optional>
#include <ostream>
#include <utility>

#include "weakarrival/cli/config.hpp"

namespace weakarrival::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitPostselection = 4,
};

struct RunOptions {
  unsigned jobs = 1;
  /// expect only: divide pi1 and the classical column by their integrals over [first, second].
  std::optional<std::pair<double, double>> normalize;
};

/// Each command validates `cfg`, writes one provenance comment line, a header
/// row and the data rows to `out`, and returns an ExitCode. Diagnostics go to `err`.
int cmd_diag(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err, const RunOptions& opt = {});
int cmd_diag_dt(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err, const RunOptions& opt = {});
int cmd_expect(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err, const RunOptions& opt = {});
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err, const RunOptions& opt = {});

/// Full command line: `weakarrival <diag|diag-dt|expect|simulate> [options]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace weakarrival::cli
