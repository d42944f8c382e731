// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/config.hpp"
#include "passevo/taguchi.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace passevo {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_toolchain_error = 2;
inline constexpr int exit_evolution_aborted = 3;

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<std::string> cache_file; // loaded when present, saved after
    std::optional<std::size_t> trials;
};

// "name=v1,v2,v3,v4" with exactly four numeric levels. Throws ConfigError.
FactorSpec parse_factor_arg(const std::string& arg);

// Runs evolution per the config; writes generations.csv, improvement.csv,
// best_sequence.txt and summary.txt under output_dir.
int cmd_evolve(const std::string& config_path, const CliOverrides& overrides,
               std::ostream& out, std::ostream& err);

// Times the unoptimized build and every baseline level; writes
// baselines.csv under output_dir. Requires the llvm backend.
int cmd_baseline(const std::string& config_path, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err);

// Runs the L16 plan (one evolution per row times trials); writes
// taguchi_plan.csv and the two S/N tables under output_dir. factors must be
// empty (defaults) or exactly three.
int cmd_tune(const std::string& config_path, const CliOverrides& overrides,
             const std::vector<FactorSpec>& factors, std::ostream& out,
             std::ostream& err);

// Prints a text summary of a finished run directory.
int cmd_report(const std::string& run_dir, std::ostream& out, std::ostream& err);

} // namespace passevo
