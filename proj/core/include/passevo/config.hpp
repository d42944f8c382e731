// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/evolution.hpp"
#include "passevo/llvm_backend.hpp"
#include "passevo/sim_backend.hpp"

#include <cstdint>
#include <string>

namespace passevo {

// Everything a subcommand needs, parsed from one run config file. The format
// is flat `key = value` lines under `[section]` headers with `#` comments.
struct RunConfig {
    std::string backend = "sim"; // "sim" or "llvm"
    std::string target_src;
    std::string workdir = "passevo-work";
    std::string output_dir = "passevo-out";
    std::string pass_pool_path;
    bool check_output = false;
    std::size_t tune_trials = 1;

    EvolutionConfig evolution;

    bool has_toolchain = false;
    ToolchainConfig toolchain;

    bool has_simulation = false;
    SimLandscape simulation;
};

// Parses and validates; diagnostics carry file:line. Referenced input paths
// must exist; workdir and output_dir are created by the caller.
RunConfig parse_config(const std::string& path);

// Parses from a string, using `name` in diagnostics. Exposed for tests.
RunConfig parse_config_text(const std::string& text, const std::string& name);

// Cross-field checks shared by parse and by CLI overrides (which can switch
// the backend after parsing).
void validate_run_config(const RunConfig& cfg);

} // namespace passevo
