// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <istream>
#include <stdexcept>
#include <thread>

namespace arprep {

namespace {

[[noreturn]] void fail(const std::string& command, const std::string& what) {
    throw std::runtime_error("external command '" + command + "': " + what);
}

struct Pipe {
    int rd = -1;
    int wr = -1;

    Pipe() {
        int fds[2];
        if (pipe(fds) != 0) throw std::runtime_error("pipe() failed");
        rd = fds[0];
        wr = fds[1];
    }
    ~Pipe() {
        close_rd();
        close_wr();
    }
    void close_rd() {
        if (rd >= 0) close(rd);
        rd = -1;
    }
    void close_wr() {
        if (wr >= 0) close(wr);
        wr = -1;
    }
};

// Writes all lines to fd, '\n'-terminated. SIGPIPE is blocked in this thread
// so a dead child surfaces as EPIPE rather than killing the process.
void write_lines(std::istream& in, int fd, std::atomic<uint64_t>& count,
                 std::atomic<bool>& done, std::atomic<bool>& broken) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    std::string line;
    while (std::getline(in, line)) {
        line.push_back('\n');
        size_t off = 0;
        while (off < line.size()) {
            ssize_t n = write(fd, line.data() + off, line.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                broken = true;
                // Consume the pending blocked SIGPIPE, if any.
                struct timespec zero = {0, 0};
                sigtimedwait(&set, nullptr, &zero);
                done = true;
                return;
            }
            off += static_cast<size_t>(n);
        }
        ++count;
    }
    done = true;
}

}  // namespace

LineFilter::LineFilter(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

uint64_t LineFilter::run(std::istream& in, const std::function<void(std::string_view)>& sink) {
    Pipe to_child;
    Pipe from_child;

    pid_t pid = fork();
    if (pid < 0) fail(command_, "fork() failed");
    if (pid == 0) {
        dup2(to_child.rd, STDIN_FILENO);
        dup2(from_child.wr, STDOUT_FILENO);
        close(to_child.rd);
        close(to_child.wr);
        close(from_child.rd);
        close(from_child.wr);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    to_child.close_rd();
    from_child.close_wr();

    std::atomic<uint64_t> lines_in{0};
    std::atomic<bool> writer_done{false};
    std::atomic<bool> pipe_broken{false};
    int write_fd = to_child.wr;
    std::thread writer([&] {
        write_lines(in, write_fd, lines_in, writer_done, pipe_broken);
        to_child.close_wr();  // EOF for the child
    });

    auto cleanup = [&](bool kill_child) {
        if (kill_child) kill(pid, SIGKILL);
        int status = 0;
        waitpid(pid, &status, 0);
        if (writer.joinable()) writer.join();
        return status;
    };

    uint64_t lines_out = 0;
    std::string buf;
    char chunk[1 << 16];
    auto idle_since = std::chrono::steady_clock::now();
    bool was_done = false;

    try {
        for (;;) {
            struct pollfd pfd = {from_child.rd, POLLIN, 0};
            int rv = poll(&pfd, 1, 100);
            if (rv < 0) {
                if (errno == EINTR) continue;
                fail(command_, "poll() failed");
            }
            bool done_now = writer_done.load();
            if (done_now && !was_done) {
                was_done = true;
                idle_since = std::chrono::steady_clock::now();
            }
            if (rv == 0) {
                if (timeout_ms_ > 0 && was_done) {
                    auto idle = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - idle_since)
                                    .count();
                    if (idle > timeout_ms_)
                        fail(command_, "timed out waiting for output line " +
                                           std::to_string(lines_out + 1));
                }
                continue;
            }
            ssize_t n = read(from_child.rd, chunk, sizeof(chunk));
            if (n < 0) {
                if (errno == EINTR) continue;
                fail(command_, "read() failed");
            }
            if (n == 0) break;  // child closed stdout
            idle_since = std::chrono::steady_clock::now();
            buf.append(chunk, static_cast<size_t>(n));
            size_t start = 0;
            for (size_t nl; (nl = buf.find('\n', start)) != std::string::npos; start = nl + 1) {
                sink(std::string_view(buf).substr(start, nl - start));
                ++lines_out;
            }
            buf.erase(0, start);
        }
        if (!buf.empty()) {
            sink(buf);  // unterminated final line
            ++lines_out;
        }
    } catch (...) {
        cleanup(true);
        throw;
    }

    int status = cleanup(false);
    if (WIFSIGNALED(status))
        fail(command_, "killed by signal " + std::to_string(WTERMSIG(status)));
    if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
        fail(command_, "exited with status " + std::to_string(WEXITSTATUS(status)));
    if (pipe_broken.load()) fail(command_, "closed stdin before reading all input");
    uint64_t total_in = lines_in.load();
    if (lines_out != total_in)
        fail(command_, "line count mismatch: sent " + std::to_string(total_in) + ", got " +
                           std::to_string(lines_out) + " (first missing line " +
                           std::to_string(lines_out + 1) + ")");
    return lines_out;
}

}  // namespace arprep
