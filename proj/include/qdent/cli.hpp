#pragma once

#include <ostream>

namespace qdent::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kDataError = 2, kFitNotConverged = 3 };

// Entry point behind the `qdent` executable. Subcommands: simulate, fidelity,
// distribution, fit, synth. Results go to --out (or `out`); diagnostics and
// the fidelity summary line go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdent::cli
