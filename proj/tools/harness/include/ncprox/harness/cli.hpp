#pragma once

#include <iosfwd>

namespace ncprox::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitSelftest = 3,
};

/// Entry point of the `ncprox` executable. Subcommands: run, selftest-prox,
/// selftest-grad, plot, eval-quant. NCPROX_OUT_DIR sets the default output
/// directory.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncprox::harness
