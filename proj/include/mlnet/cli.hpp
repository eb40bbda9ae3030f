#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlnet {

inline constexpr const char* kToolName = "mlnet";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one batch subcommand. args excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on data or computation errors
/// (reported as a single `ERROR <code>: <message>` line on err).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlnet
