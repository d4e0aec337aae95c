#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qre/app/config.hpp"
#include "qre/error.hpp"

namespace qre::app {

enum ExitCode : int {
    kExitOk         = 0,
    kExitConfig     = 2,
    kExitSynthesis  = 3,
    kExitAnalysis   = 4,
    kExitAcceptance = 5,
};

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::string>           preset;
    std::filesystem::path                out = ".";
    bool                                 strict_pr      = false;
    bool                                 require_stable = false;
    double                               tol            = 1e-8;
    std::optional<std::filesystem::path> estimator_file;
};

// --preset wins over --config; one of them is required. Throws ConfigError.
[[nodiscard]] RunConfig resolve_config(const CommandOptions& opts);

struct Assertion {
    std::string name;
    bool        pass = false;
    std::string detail;
};

// Each command returns a process exit code and reports failures on `err`.
int run_synthesize(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int run_bode(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int run_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int run_reproduce(const CommandOptions& opts, std::ostream& out, std::ostream& err);

} // namespace qre::app
