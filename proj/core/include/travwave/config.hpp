#pragma once

#include <filesystem>
#include <string>

#include "travwave/problem.hpp"

namespace travwave {

struct LoadedProblem {
    ProblemSpec spec;
    std::string rawBytes;   // exact file contents, hashed into reports
    std::string path;
};

/// Loads a problem file. `.json` parses as JSON, `.toml` as the TOML subset
/// documented in the README; other extensions are sniffed (leading '{' means
/// JSON). Unknown keys are rejected.
LoadedProblem load_problem_file(const std::filesystem::path& path);

/// Same schema from an in-memory string.
ProblemSpec parse_problem_text(const std::string& text, bool isJson);

} // namespace travwave
