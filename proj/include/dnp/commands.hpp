#pragma once

#include <iosfwd>
#include <string>

#include "dnp/scenario.hpp"

namespace dnp {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitPrecondition = 2, kExitNumerical = 3 };

struct CommandArgs {
  /// run, stationary, continuation, depend, fit or validate
  std::string command;
  std::string config;
  /// overrides [output].dir when nonempty
  std::string out;
  /// overrides [output].checkpoint_every when >= 0
  long checkpoint_every = -1;
};

/// Executes one subcommand. Reports go to out (validate) or to files under the
/// output directory; failures print one JSON object on err.
int run_command(const CommandArgs& args, std::ostream& out, std::ostream& err);

/// Exit code for an exception thrown by the pipeline.
int exit_code_for(const std::exception& e);

/// Regime implied by alpha's flat window and the forcing kind.
Regime default_regime(const Scenario& s);

/// Constant forcing field, or zero for the other kinds.
Eigen::VectorXd limit_forcing(const Scenario& s);

}  // namespace dnp
