#pragma once

#include <ostream>

namespace loopsec {

/// Exit codes: 0 success, 1 usage or configuration error, 2 solver error,
/// 3 verification gap above tolerance.
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitVerify = 3;

/// Environment variable naming the default directory for sweep and Monte Carlo output.
inline constexpr const char* kOutputDirEnv = "LOOPSEC_OUTPUT_DIR";

int cli_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace loopsec
