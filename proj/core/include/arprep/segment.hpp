// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_SEGMENT_HPP
#define ARPREP_SEGMENT_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "arprep/subprocess.hpp"

namespace arprep::seg {

// Greedy clitic segmentation: prefix(es) + stem + suffix(es), with the
// original word always recoverable by concatenation.
struct SegmentedWord {
    std::vector<std::string> prefixes;  // reading order
    std::string stem;
    std::vector<std::string> suffixes;  // reading order

    std::string join() const;
};

// Clitic inventory. Lengths are codepoints, not bytes.
struct AffixTable {
    std::vector<std::string> prefixes;
    std::vector<std::string> suffixes;
    int min_stem_len = 2;
    int max_prefixes = 2;
    int max_suffixes = 2;

    static const AffixTable& builtin();
    // File format: [prefixes] / [suffixes] section headers, one affix per
    // line, '#' comments.
    static AffixTable load(const std::filesystem::path& file);
};

enum class MarkerStyle {
    kPlusMarks,    // "و+ كتاب +نا"
    kSpaceJoined,  // "و كتاب نا"
};

class Segmenter {
public:
    explicit Segmenter(const AffixTable& table = AffixTable::builtin());

    // Greedy longest-match stripping, deterministic; words admitting no
    // decomposition come back as {[], word, []}.
    SegmentedWord word(std::string_view word) const;

    // Whitespace tokens made purely of Arabic-script letters are segmented;
    // everything else (@USERNAME, URL, NUM, emojis, Latin) passes through.
    std::string line(std::string_view line, MarkerStyle style) const;

private:
    AffixTable table_;
    std::vector<std::u32string> prefixes_;  // longest first
    std::vector<std::u32string> suffixes_;
};

SegmentedWord segment_word(std::string_view word, const AffixTable& table);

std::string render_segments(const SegmentedWord& seg, MarkerStyle style);

// Inverse of render_segments for kPlusMarks (morphs must not contain '+').
// kSpaceJoined renders bare morphs and is not uniquely invertible: only the
// morph list survives, so this throws std::invalid_argument for it.
SegmentedWord parse_segments(std::string_view rendered, MarkerStyle style);

// Streams lines through an external segmenter process; one segmented output
// line per input line, enforced. Returns the line count.
uint64_t segment_via_external(std::istream& lines, const std::string& command,
                              const std::function<void(std::string_view)>& sink,
                              int timeout_ms = 30000);

}  // namespace arprep::seg

#endif  // ARPREP_SEGMENT_HPP
