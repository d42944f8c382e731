// SPDX-License-Identifier: Apache-2.0
#include "passevo/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace passevo {
namespace {

// Child-side stream redirection; async-signal-safe calls only.
bool redirect_fd(const char* path, int flags, int target_fd) {
    int fd = ::open(path, flags, 0644);
    if (fd < 0) return false;
    if (::dup2(fd, target_fd) < 0) {
        ::close(fd);
        return false;
    }
    ::close(fd);
    return true;
}

void write_exact(int fd, const void* buf, std::size_t len) {
    const char* p = static_cast<const char*>(buf);
    while (len > 0) {
        ssize_t w = ::write(fd, p, len);
        if (w <= 0) {
            if (errno == EINTR) continue;
            return;
        }
        p += w;
        len -= static_cast<std::size_t>(w);
    }
}

} // namespace

RunResult run_process(const RunSpec& spec) {
    RunResult result;
    if (spec.argv.empty()) {
        result.spawn_failed = true;
        result.error = "empty argv";
        return result;
    }

    std::vector<char*> argv;
    argv.reserve(spec.argv.size() + 1);
    for (const std::string& a : spec.argv)
        argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    // exec-failure reporting channel: the child writes errno here and the
    // close-on-exec flag guarantees a successful exec writes nothing.
    int err_pipe[2];
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
        result.spawn_failed = true;
        result.error = std::string("pipe2: ") + std::strerror(errno);
        return result;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(err_pipe[0]);
        ::close(err_pipe[1]);
        result.spawn_failed = true;
        result.error = std::string("fork: ") + std::strerror(errno);
        return result;
    }

    if (pid == 0) {
        ::setpgid(0, 0);
        int err = 0;
        if (!spec.cwd.empty() && ::chdir(spec.cwd.c_str()) != 0) err = errno;
        const char* out = spec.stdout_path.empty() ? "/dev/null" : spec.stdout_path.c_str();
        const char* msg = spec.stderr_path.empty() ? "/dev/null" : spec.stderr_path.c_str();
        if (err == 0 && !redirect_fd("/dev/null", O_RDONLY, STDIN_FILENO)) err = errno;
        if (err == 0 && !redirect_fd(out, O_WRONLY | O_CREAT | O_TRUNC, STDOUT_FILENO))
            err = errno;
        if (err == 0 && !redirect_fd(msg, O_WRONLY | O_CREAT | O_TRUNC, STDERR_FILENO))
            err = errno;
        if (err == 0) {
            ::execvp(argv[0], argv.data());
            err = errno;
        }
        write_exact(err_pipe[1], &err, sizeof(err));
        ::_exit(127);
    }

    ::close(err_pipe[1]);
    ::setpgid(pid, pid); // races with the child doing the same; either wins

    std::mutex mu;
    std::condition_variable cv;
    bool reaped = false;
    bool killed = false;
    std::thread watchdog;
    if (spec.timeout_s > 0.0) {
        watchdog = std::thread([&] {
            std::unique_lock<std::mutex> lock(mu);
            const auto deadline =
                std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(spec.timeout_s));
            if (!cv.wait_until(lock, deadline, [&] { return reaped; })) {
                ::kill(-pid, SIGKILL);
                killed = true;
            }
        });
    }

    int status = 0;
    pid_t waited;
    do {
        waited = ::waitpid(pid, &status, 0);
    } while (waited < 0 && errno == EINTR);
    const auto t1 = std::chrono::steady_clock::now();

    {
        std::lock_guard<std::mutex> lock(mu);
        reaped = true;
    }
    cv.notify_all();
    if (watchdog.joinable()) watchdog.join();

    result.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

    int child_errno = 0;
    ssize_t got;
    do {
        got = ::read(err_pipe[0], &child_errno, sizeof(child_errno));
    } while (got < 0 && errno == EINTR);
    ::close(err_pipe[0]);
    if (got == static_cast<ssize_t>(sizeof(child_errno))) {
        result.spawn_failed = true;
        result.error = std::string(spec.argv[0]) + ": " + std::strerror(child_errno);
        return result;
    }

    if (killed) {
        result.timed_out = true;
        return result;
    }
    if (waited < 0) {
        result.spawn_failed = true;
        result.error = std::string("waitpid: ") + std::strerror(errno);
        return result;
    }
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
        result.error = std::string("killed by signal ") + std::to_string(WTERMSIG(status));
    }
    return result;
}

std::string read_file_head(const std::string& path, std::size_t max_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::string buf(max_bytes, '\0');
    in.read(buf.data(), static_cast<std::streamsize>(max_bytes));
    buf.resize(static_cast<std::size_t>(in.gcount()));
    return buf;
}

} // namespace passevo
