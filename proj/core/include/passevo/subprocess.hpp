// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace passevo {

struct RunSpec {
    std::vector<std::string> argv;
    // Empty path redirects the stream to /dev/null; stdin is always
    // /dev/null.
    std::string stdout_path;
    std::string stderr_path;
    std::string cwd;
    double timeout_s = 0.0; // 0 disables the watchdog
};

struct RunResult {
    int exit_code = -1;
    bool timed_out = false;
    bool spawn_failed = false;
    // Wall-clock seconds from just before spawn to just after the exit was
    // reaped; the timed quantity for fitness.
    double wall_seconds = 0.0;
    std::string error;

    bool ok() const { return !timed_out && !spawn_failed && exit_code == 0; }
};

// Runs argv as a child in its own process group. On timeout the whole group
// is killed. Never throws; every failure mode lands in the result.
RunResult run_process(const RunSpec& spec);

// First max_bytes bytes of a file; empty string when unreadable.
std::string read_file_head(const std::string& path, std::size_t max_bytes);

} // namespace passevo
