#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ndopt::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDataError = 3 };

/// Entry point of the `ndopt` tool. Subcommands: train, evaluate, bench,
/// verify. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ndopt::cli
