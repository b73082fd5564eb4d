#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dairyq {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "DAIRYQ_OUTPUT_DIR";

/// Entry point of the `dairyq` tool. `args` excludes the program name.
/// Returns the process exit code; failures print one `error: <kind>: <msg>`
/// line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dairyq
