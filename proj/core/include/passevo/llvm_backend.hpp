// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/fitness.hpp"
#include "passevo/pass_pool.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace passevo {

// External-toolchain command templates. Placeholders in {braces} are
// substituted verbatim; a whitespace-delimited template token that is
// exactly one placeholder splices its value word-split, so multi-flag values
// expand into separate argv entries.
struct ToolchainConfig {
    std::string frontend_cmd; // {src} {out}
    std::string opt_cmd;      // {in} {out} {passes}
    std::string backend_cmd;  // {in} {out}
    std::string baseline_cmd; // {src} {out} {level}
    std::string run_cmd;      // {bin} {args}
    std::string run_args;
    double timeout_s = 60.0;
    std::vector<std::string> levels = {"O0", "O1", "O2", "O3", "Os", "Oz"};
    // {passes} expands to pass_prefix+token joined by passes_joiner.
    std::string passes_joiner = " ";
    std::string pass_prefix = "-";
};

// Fills the five command templates for a known toolchain style; other fields
// are untouched. Names: "legacy" (one -token flag per pass) and "newpm"
// (-passes=tok,tok).
void apply_toolchain_preset(ToolchainConfig& tc, const std::string& preset);

// Checks required placeholders and rejects unknown ones. Throws ConfigError.
void validate_toolchain(const ToolchainConfig& tc);

// Splits a template into argv entries and substitutes placeholder values.
// Values may be multi-word only where the template token is exactly the
// placeholder. Unknown placeholder names throw ConfigError.
std::vector<std::string> expand_template(const std::string& tmpl,
                                         const std::map<std::string, std::string>& values);

std::string join_passes(const std::vector<std::string>& seq, const ToolchainConfig& tc);

struct CompileResult {
    MeasureStatus status = MeasureStatus::Ok;
    std::string exe_path;
    std::string eval_dir;
    std::string detail;
};

// Runs frontend, opt, backend stages inside a fresh `<workdir>/eval-N/`
// directory (N from a process-wide counter) producing ir.ll, opt.ll, a.out.
// Any stage failure maps to CompileFailed with the stage's stderr head
// attached; an empty sequence is rejected the same way.
CompileResult compile_with_sequence(const std::string& src,
                                    const std::vector<std::string>& seq,
                                    const ToolchainConfig& tc, const std::string& workdir);

// Builds with baseline_cmd at one level, or with frontend+backend (no opt
// stage) when level is empty: the unoptimized build.
CompileResult compile_baseline(const std::string& src, const std::string& level,
                               const ToolchainConfig& tc, const std::string& workdir);

// Times run_cmd on the binary n times sequentially, wall-clock spawn to
// exit. Nonzero exit maps to RunFailed, watchdog expiry to TimedOut. When
// expected_stdout is set, each run's stdout must match it byte for byte or
// the run counts as RunFailed.
FitnessRecord measure_runtime(const std::string& bin, const ToolchainConfig& tc,
                              std::size_t n,
                              const std::optional<std::string>& expected_stdout = std::nullopt);

struct BaselineEntry {
    std::string label;
    FitnessRecord record;
};

struct BaselineReport {
    std::vector<BaselineEntry> entries; // "unoptimized" first, then levels
};

// Builds and times the unoptimized binary plus one binary per level.
// Per-level failures stay in that level's record; the rest proceed.
BaselineReport measure_baselines(const std::string& src, const ToolchainConfig& tc,
                                 std::size_t n, const std::string& workdir);

class LlvmBackend final : public Backend {
public:
    // check_output compares every evolved binary's stdout with the
    // unoptimized binary's (built lazily on first use).
    LlvmBackend(ToolchainConfig tc, std::string target_src, std::string workdir,
                bool check_output = false);

    std::string name() const override { return "llvm"; }
    bool parallel_safe() const override { return false; }
    Measurement measure(const std::vector<std::string>& sequence,
                        std::size_t runs) override;

    const ToolchainConfig& toolchain() const { return tc_; }

private:
    ToolchainConfig tc_;
    std::string src_;
    std::string workdir_;
    bool check_output_;
    bool reference_ready_ = false;
    bool reference_failed_ = false;
    std::string reference_stdout_;
    std::string reference_detail_;
};

} // namespace passevo
