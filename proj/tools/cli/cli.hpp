#pragma once

#include <string>
#include <vector>

namespace grushin::cli {

/// Exit statuses of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerdict = 2;

/// Runs one command. `args` excludes the program name, e.g.
/// {"lab", "harnack", "--config", "sweep.json"}. Artifacts go to the run
/// directory; a one-line status per report goes to stdout.
int run(const std::vector<std::string>& args);

}  // namespace grushin::cli
