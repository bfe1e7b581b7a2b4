// Subcommand entry points, factored out of main so tests can drive them.
// Exit codes: 0 success / all checks pass, 1 solver failure or failed checks,
// 2 not covered by any case, 3 structural violation, 64 malformed input.
#pragma once

#include <iosfwd>
#include <string>

namespace sing::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolveFailure = 1;
inline constexpr int kExitNotCovered = 2;
inline constexpr int kExitStructuralViolation = 3;
inline constexpr int kExitUsage = 64;

int cmd_classify(double m, double p, double q, double r, double s, std::ostream& out);
int cmd_solve_scalar(const std::string& config_path, std::ostream& out);
int cmd_solve_system(const std::string& config_path, std::ostream& out);
int cmd_verify(const std::string& config_path, std::ostream& out);
int cmd_sweep(const std::string& config_path, std::ostream& out);

}  // namespace sing::cli
