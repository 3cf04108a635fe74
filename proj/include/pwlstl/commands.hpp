#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pwlstl {

// Stable exit codes shared by the CLI and tests:
//   0 success / property satisfied
//   1 monitored trajectory violates the formula
//   2 malformed input (mission, trajectory, flags)
//   3 synthesis infeasible
//   4 solver hit a limit
//   5 solver result failed monitor re-verification
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSolverLimit = 4;
inline constexpr int kExitVerifyMismatch = 5;

int run_monitor(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_encode(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_synth(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_plot(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace pwlstl
