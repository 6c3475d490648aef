#pragma once

#include <iosfwd>

#include "qcarpet/cli/config.hpp"

namespace qcarpet::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

/// Runs one validated subcommand and returns its exit code. Errors
/// propagate as exceptions.
int run_command(const RunConfig& cfg, std::ostream& out);

/// Maps an in-flight exception to the exit-code contract and prints it.
int report_exception(std::ostream& err);

/// Parses argv (and any --config file) and runs the subcommand.
int main_entry(int argc, char** argv);

}  // namespace qcarpet::cli
