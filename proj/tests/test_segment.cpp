// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/segment.hpp"

#include <fstream>
#include <sstream>

#include "arprep/rng.hpp"
#include "arprep/unicode.hpp"
#include "doctest.h"
#include "support/corpus_gen.hpp"
#include "support/testutil.hpp"

using namespace arprep;
using namespace arprep::seg;

namespace {

// Exhaustive oracle: every decomposition consistent with the table.
struct Split {
    std::vector<std::string> prefixes;
    std::string stem;
    std::vector<std::string> suffixes;

    bool operator==(const SegmentedWord& w) const {
        return prefixes == w.prefixes && stem == w.stem && suffixes == w.suffixes;
    }
};

void enumerate_prefix_splits(const std::u32string& w, size_t lo, size_t hi,
                             const AffixTable& table, std::vector<std::u32string>& acc_p,
                             std::vector<Split>& out);

void enumerate_suffix_splits(const std::u32string& w, size_t lo, size_t hi,
                             const AffixTable& table, const std::vector<std::u32string>& acc_p,
                             std::vector<std::u32string>& acc_s, std::vector<Split>& out) {
    const bool no_affixes = acc_p.empty() && acc_s.empty();
    if (hi > lo && (no_affixes || hi - lo >= static_cast<size_t>(table.min_stem_len))) {
        Split split;
        for (const auto& p : acc_p) split.prefixes.push_back(uni::encode_utf8(p));
        split.stem = uni::encode_utf8(w.substr(lo, hi - lo));
        for (auto it = acc_s.rbegin(); it != acc_s.rend(); ++it)
            split.suffixes.push_back(uni::encode_utf8(*it));
        out.push_back(std::move(split));
    }
    if (acc_s.size() >= static_cast<size_t>(table.max_suffixes)) return;
    for (const auto& s : table.suffixes) {
        std::u32string su = uni::decode_utf8(s);
        if (hi - lo < su.size() + static_cast<size_t>(table.min_stem_len)) continue;
        if (w.compare(hi - su.size(), su.size(), su) != 0) continue;
        acc_s.push_back(su);
        enumerate_suffix_splits(w, lo, hi - su.size(), table, acc_p, acc_s, out);
        acc_s.pop_back();
    }
}

void enumerate_prefix_splits(const std::u32string& w, size_t lo, size_t hi,
                             const AffixTable& table, std::vector<std::u32string>& acc_p,
                             std::vector<Split>& out) {
    std::vector<std::u32string> acc_s;
    enumerate_suffix_splits(w, lo, hi, table, acc_p, acc_s, out);
    if (acc_p.size() >= static_cast<size_t>(table.max_prefixes)) return;
    for (const auto& p : table.prefixes) {
        std::u32string pu = uni::decode_utf8(p);
        if (hi - lo < pu.size() + static_cast<size_t>(table.min_stem_len)) continue;
        if (w.compare(lo, pu.size(), pu) != 0) continue;
        acc_p.push_back(pu);
        enumerate_prefix_splits(w, lo + pu.size(), hi, table, acc_p, out);
        acc_p.pop_back();
    }
}

std::vector<Split> all_valid_splits(const std::string& word, const AffixTable& table) {
    std::u32string w = uni::decode_utf8(word);
    std::vector<Split> out;
    std::vector<std::u32string> acc_p;
    enumerate_prefix_splits(w, 0, w.size(), table, acc_p, out);
    return out;
}

std::string random_morphs_word(DetRng& rng, const AffixTable& table) {
    std::string word;
    uint64_t n_pre = rng.below(3);
    for (uint64_t i = 0; i < n_pre; ++i)
        word += table.prefixes[rng.below(table.prefixes.size())];
    word += testsupport::random_arabic_word(rng, 2, 5);
    uint64_t n_suf = rng.below(3);
    for (uint64_t i = 0; i < n_suf; ++i)
        word += table.suffixes[rng.below(table.suffixes.size())];
    return word;
}

}  // namespace

TEST_CASE("the worked conjunction+stem+pronoun example") {
    SegmentedWord w = segment_word("وكتابنا", AffixTable::builtin());
    CHECK(w.prefixes == std::vector<std::string>{"و"});
    CHECK(w.stem == "كتاب");
    CHECK(w.suffixes == std::vector<std::string>{"نا"});
    CHECK(render_segments(w, MarkerStyle::kPlusMarks) == "و+ كتاب +نا");
    CHECK(render_segments(w, MarkerStyle::kSpaceJoined) == "و كتاب نا");
}

TEST_CASE("words without affixes stay whole") {
    SegmentedWord w = segment_word("كتاب", AffixTable::builtin());
    CHECK(w.prefixes.empty());
    CHECK(w.stem == "كتاب");
    CHECK(w.suffixes.empty());
    CHECK(render_segments(w, MarkerStyle::kPlusMarks) == "كتاب");
}

TEST_CASE("article and double clitics") {
    SegmentedWord article = segment_word("الكتاب", AffixTable::builtin());
    CHECK(article.prefixes == std::vector<std::string>{"ال"});
    CHECK(article.stem == "كتاب");

    SegmentedWord two = segment_word("والكتاب", AffixTable::builtin());
    CHECK(two.prefixes == std::vector<std::string>{"وال"});  // longest match wins
    CHECK(two.stem == "كتاب");
}

TEST_CASE("min stem length blocks over-stripping") {
    // لل + ه would leave a single letter; the table's floor is 2.
    SegmentedWord w = segment_word("لله", AffixTable::builtin());
    CHECK(w.join() == "لله");
    CHECK(uni::codepoint_count(w.stem) >= 2);
}

TEST_CASE("lossless join over generated words") {
    const AffixTable& table = AffixTable::builtin();
    Segmenter segmenter(table);
    DetRng rng(31);
    for (int i = 0; i < 10000; ++i) {
        std::string word = random_morphs_word(rng, table);
        SegmentedWord w = segmenter.word(word);
        CHECK(w.join() == word);
        if (!w.prefixes.empty() || !w.suffixes.empty())
            CHECK(uni::codepoint_count(w.stem) >=
                  static_cast<size_t>(table.min_stem_len));
    }
}

TEST_CASE("greedy result is always a table-consistent split") {
    const AffixTable& table = AffixTable::builtin();
    Segmenter segmenter(table);
    DetRng rng(32);
    for (int i = 0; i < 2000; ++i) {
        std::string word = random_morphs_word(rng, table);
        SegmentedWord got = segmenter.word(word);
        auto splits = all_valid_splits(word, table);
        bool found = false;
        for (const auto& s : splits)
            if (s == got) found = true;
        CAPTURE(word);
        CHECK(found);
    }
}

TEST_CASE("plus-marks rendering round-trips") {
    const AffixTable& table = AffixTable::builtin();
    Segmenter segmenter(table);
    DetRng rng(33);
    for (int i = 0; i < 5000; ++i) {
        SegmentedWord w = segmenter.word(random_morphs_word(rng, table));
        SegmentedWord parsed = parse_segments(render_segments(w, MarkerStyle::kPlusMarks),
                                              MarkerStyle::kPlusMarks);
        CHECK(parsed.prefixes == w.prefixes);
        CHECK(parsed.stem == w.stem);
        CHECK(parsed.suffixes == w.suffixes);
        // space-joined keeps the morph list, not the affix split
        std::string joined = render_segments(w, MarkerStyle::kSpaceJoined);
        size_t morphs = 1 + w.prefixes.size() + w.suffixes.size();
        size_t tokens = 1 + static_cast<size_t>(std::count(joined.begin(), joined.end(), ' '));
        CHECK(tokens == morphs);
    }
    CHECK_THROWS_AS(parse_segments("و كتاب", MarkerStyle::kSpaceJoined), std::invalid_argument);
}

TEST_CASE("line segmentation passes non-Arabic tokens through") {
    Segmenter segmenter;
    CHECK(segmenter.line("وكتابنا @USERNAME URL NUM \U0001F602", MarkerStyle::kPlusMarks) ==
          "و+ كتاب +نا @USERNAME URL NUM \U0001F602");
    CHECK(segmenter.line("", MarkerStyle::kPlusMarks) == "");
}

TEST_CASE("affix table file loads and validates") {
    AffixTable table = AffixTable::load(std::filesystem::path(ARPREP_DATA_DIR) / "affixes.txt");
    CHECK(table.prefixes == AffixTable::builtin().prefixes);
    CHECK(table.suffixes == AffixTable::builtin().suffixes);

    auto dir = testsupport::make_temp_dir("affix");
    testsupport::write_file(dir / "bad.txt", "و\n");  // entry before a section header
    CHECK_THROWS(AffixTable::load(dir / "bad.txt"));
}

TEST_CASE("external adapter: identity command") {
    std::stringstream in("سطر اول\nسطر ثان\n");
    std::vector<std::string> out;
    uint64_t n = segment_via_external(in, "cat",
                                      [&](std::string_view l) { out.emplace_back(l); });
    CHECK(n == 2);
    CHECK(out == std::vector<std::string>{"سطر اول", "سطر ثان"});
}

TEST_CASE("external adapter: our own segmenter as a subprocess") {
    auto dir = testsupport::make_temp_dir("extseg");
    std::string input;
    DetRng rng(34);
    std::vector<std::string> lines;
    for (int i = 0; i < 50; ++i) {
        lines.push_back(testsupport::random_tweet_line(rng));
        input += lines.back() + "\n";
    }
    std::string cmd = std::string(ARPREP_CLI_PATH) + " segment --segmenter builtin";
    std::stringstream in(input);
    std::vector<std::string> external_out;
    segment_via_external(in, cmd, [&](std::string_view l) { external_out.emplace_back(l); });

    Segmenter segmenter;
    REQUIRE(external_out.size() == lines.size());
    for (size_t i = 0; i < lines.size(); ++i)
        CHECK(external_out[i] == segmenter.line(lines[i], MarkerStyle::kPlusMarks));
}

TEST_CASE("external adapter: dropped lines are an error naming the command") {
    std::stringstream in("a\nb\nc\nd\n");
    CHECK_THROWS_WITH_AS(
        segment_via_external(in, "head -n 2", [](std::string_view) {}),
        doctest::Contains("head -n 2"), std::runtime_error);
}

TEST_CASE("external adapter: nonzero exit is an error") {
    std::stringstream in("");
    CHECK_THROWS_WITH_AS(segment_via_external(in, "exit 3", [](std::string_view) {}),
                         doctest::Contains("status 3"), std::runtime_error);
}

TEST_CASE("external adapter: hanging command times out") {
    std::stringstream in("a\n");
    CHECK_THROWS_WITH_AS(
        segment_via_external(in, "sleep 30", [](std::string_view) {}, /*timeout_ms=*/300),
        doctest::Contains("timed out"), std::runtime_error);
}
