#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace octcft {

inline constexpr const char* kToolVersion = "0.1.0";

/// Environment variable holding the worker thread count (parallelism only;
/// reports do not depend on it).
inline constexpr const char* kThreadsEnv = "OCTCFT_THREADS";

/// The octcft command line. args excludes the program name. Writes the JSON
/// report to out and short diagnostics to err. Returns 0 when every check
/// passes, 1 when a check fails, 2 on input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace octcft
