#pragma once

namespace maxlab::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsage = 2, kBudget = 3 };

// Entry point of the maxlab tool.
int run(int argc, char** argv);

}  // namespace maxlab::cli
