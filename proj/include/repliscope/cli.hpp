#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "repliscope/error.hpp"

namespace repliscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag values or combinations; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> artifacts;
    Warnings log;
};

/// Runs one command line (without the program name), e.g.
/// {"replication", "train.vds", "gen.vds", "--alpha", "8000"}.
RunResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repliscope::cli
