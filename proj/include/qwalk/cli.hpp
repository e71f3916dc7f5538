#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qwalk::cli {

inline constexpr const char* tool_version = "qwalk 0.1.0";

enum ExitCode : int { ok = 0, invalid_config = 2, numerical_failure = 3 };

/// Environment lookup; tests substitute a fixed map for the process environment.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env());

} // namespace qwalk::cli
