#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "acx/cli/config.hpp"
#include "acx/cli/run.hpp"

namespace acx::cli {

/// Command-line overrides. Flags win over the config file; the run directory
/// falls back to the config's `out`, then to $ACX_OUT.
struct Options {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scale;
    std::optional<std::size_t> jobs;
    std::optional<std::filesystem::path> out;
};

// gen-data, train-gnn, extract-gt, train-explainer, evaluate, export-viz, report, pipeline
const std::vector<std::string>& command_names();

/// Runs one command under the run-directory lock, writing progress to `log`.
/// Throws ConfigError, PrerequisiteError, NumericalError or other acx errors.
void run_command(const std::string& name, const Options& options, std::ostream& log);

/// 2 config error, 3 missing prerequisite, 4 numerical failure, 1 anything else.
int exit_code(const std::exception& e);

/// The config a command would use: --config, else the run directory's
/// snapshot, else defaults; then flag overrides and resolve().
struct Context {
    RunConfig config;
    RunDirectory dir;
    std::string hash;
};
Context make_context(const Options& options);

} // namespace acx::cli
