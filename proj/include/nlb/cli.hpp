#pragma once

#include <iosfwd>

namespace nlb {

/// Process exit codes of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitDomain = 1,       ///< validation, domain, I/O, or failed verification
    kExitConvergence = 2,  ///< non-convergence or divergence
    kExitBadArguments = 3,
};

/**
 * Entry point of the `nlb` tool. Subcommands: solve, td, qvalues,
 * contraction, verify-ordering, sweep-gaps, sweep-curves, validate.
 * Errors are reported as one line on `err`.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nlb
