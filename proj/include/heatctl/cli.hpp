#pragma once

#include <ostream>

namespace heatctl {

enum ExitCode : int {
  exit_ok = 0,
  exit_property_failed = 1,
  exit_infeasible = 2,
  exit_not_converged = 3,
  exit_input_error = 4,
};

// Entry point of the `heatctl` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heatctl
