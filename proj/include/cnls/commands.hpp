#pragma once

#include <iosfwd>

#include "cnls/acceptance.hpp"
#include "cnls/io.hpp"

namespace cnls {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNotConverged = 2 };

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_classify(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_reduce(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_thresholds(const RunConfig& c, std::ostream& out, std::ostream& err);
/// Report lines go to `out`, timings to `err`.
int cmd_selftest(const AcceptanceOptions& opts, std::ostream& out, std::ostream& err);

/// Entry point of the command-line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cnls
