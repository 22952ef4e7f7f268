#pragma once

#include "config.hpp"

#include <functional>
#include <optional>
#include <string>

namespace lsa {

/// Command-line level settings that do not enter the config digest.
struct RunOptions {
    int jobs = 1;                    ///< 0 = hardware concurrency
    bool resume = false;
    std::function<void(const std::string&)> progress; ///< optional status lines
};

struct RunResult {
    std::string directory; ///< run directory holding every output
    std::string digest;
    nlohmann::json summary;
    std::string summary_text; ///< human-readable lines for the terminal
};

/// Runs the config's scenario and writes its outputs under
/// <output_dir>/<scenario>-<digest prefix>/. Outputs depend only on the
/// config, never on `jobs` or on whether the run was resumed.
RunResult execute(const RunConfig& cfg, const RunOptions& opt = {});

/// Run directory the config maps to.
std::string run_directory(const RunConfig& cfg);

/// Exit status for an exception escaping execute(): 2 for configuration and
/// argument errors, 3 for numerical failures, 1 otherwise.
int exit_code_for(const std::exception& e);

inline constexpr const char* kToolVersion = LSA_VERSION_STRING;
inline constexpr int kManifestVersion = 1;

} // namespace lsa
