#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jsqldp::cli
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_validation = 2,
    exit_runtime = 3,
};

/// Runs the command line `args` (args[0] is the program name). Normal
/// output goes to `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace jsqldp::cli
