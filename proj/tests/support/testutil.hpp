// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_TESTS_TESTUTIL_HPP
#define ARPREP_TESTS_TESTUTIL_HPP

#include <filesystem>
#include <string>

namespace testsupport {

// Fresh directory under the system temp root; removed by the caller (or
// left for inspection, they are cheap).
std::filesystem::path make_temp_dir(const std::string& hint);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Order-independent digest of a directory tree: relative paths plus bytes.
std::string dir_hash(const std::filesystem::path& dir);

}  // namespace testsupport

#endif  // ARPREP_TESTS_TESTUTIL_HPP
