#pragma once

// Command-line front end. Subcommands:
//   simulate, picard, verify-bracket, verify-smoothing, conjugate-check,
//   decay-experiment, existence-time, convergence, plot, replay
// Exit codes: 0 success, 1 numerical failure, 2 validation failure.

#include <ostream>
#include <string>

#include "dklb/config.hpp"

namespace dklb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitValidation = 2;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an experiment subcommand with an already built configuration and
/// writes its outputs and manifest.json into cfg.output.dir. `config_hash`
/// is recorded as an input when non-empty.
int run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& out,
                   const std::string& config_hash = "");

}  // namespace dklb
