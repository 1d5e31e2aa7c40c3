// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_SUBPROCESS_HPP
#define ARPREP_SUBPROCESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace arprep {

// Streams lines through an external command (run via /bin/sh -c) that must
// emit exactly one output line per input line. Input is fed from a writer
// thread so the exchange proceeds in bounded memory.
//
// The timeout is idle time: once all input has been sent, the child gets at
// most timeout_ms between output lines before it is killed. While input is
// still streaming no deadline applies (filters may buffer arbitrarily).
class LineFilter {
public:
    explicit LineFilter(std::string command, int timeout_ms = 30000);

    // Returns the number of lines exchanged. Throws std::runtime_error on
    // nonzero exit, timeout, or an output/input line-count mismatch (the
    // message names the command and the first missing line).
    uint64_t run(std::istream& in, const std::function<void(std::string_view)>& sink);

private:
    std::string command_;
    int timeout_ms_;
};

}  // namespace arprep

#endif  // ARPREP_SUBPROCESS_HPP
