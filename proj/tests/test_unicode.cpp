// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/unicode.hpp"

#include "arprep/hash128.hpp"
#include "arprep/rng.hpp"
#include "doctest.h"

using namespace arprep;
namespace uni = arprep::uni;

TEST_CASE("utf8 round-trip over random scalar values") {
    DetRng rng(81);
    for (int i = 0; i < 2000; ++i) {
        std::u32string cps;
        size_t len = rng.below(40);
        for (size_t k = 0; k < len; ++k) {
            char32_t c;
            do {
                c = static_cast<char32_t>(1 + rng.below(0x10FFFF));
            } while (c >= 0xD800 && c <= 0xDFFF);
            cps.push_back(c);
        }
        std::string bytes = uni::encode_utf8(cps);
        CHECK(uni::is_valid_utf8(bytes));
        CHECK(uni::decode_utf8(bytes) == cps);
        CHECK(uni::codepoint_count(bytes) == cps.size());
    }
}

TEST_CASE("malformed bytes decode to replacements, never crash") {
    // stray continuation, truncated lead, overlong, surrogate, out of range
    for (std::string bad : {"\x80", "\xC3", "\xC0\xAF", "\xED\xA0\x80", "\xF5\x80\x80\x80"}) {
        std::u32string out = uni::decode_utf8(bad);
        CHECK(!out.empty());
        for (char32_t c : out) CHECK((c == uni::kReplacement || c < 0x80));
    }
}

TEST_CASE("character classes") {
    CHECK(uni::is_arabic_letter(U'ك'));  // kaf
    CHECK(!uni::is_arabic_letter(U'a'));
    CHECK(!uni::is_arabic_letter(U'َ'));  // fatha is a mark
    CHECK(uni::is_arabic_diacritic(U'َ'));
    CHECK(uni::is_arabic_diacritic(U'ٰ'));
    CHECK(!uni::is_arabic_diacritic(U'ـ'));  // kashida has its own rule
    CHECK(uni::is_digit_cp(U'7'));
    CHECK(uni::is_digit_cp(U'٣'));
    CHECK(uni::is_punct_or_symbol(U'!'));
    CHECK(uni::is_punct_or_symbol(U'،'));  // Arabic comma
    CHECK(!uni::is_punct_or_symbol(U'\U0001F602'));  // emoji excluded
    CHECK(uni::is_emoji(U'\U0001F602'));
    CHECK(uni::is_emoji(U'❤'));
    CHECK(!uni::is_emoji(U'ك'));
    CHECK(uni::is_space(U' '));
    CHECK(uni::is_space(U' '));
    CHECK(!uni::is_space(U'_'));
}

TEST_CASE("murmur3 is stable and seed-dependent") {
    Hash128 a = murmur3_128("hello", 0);
    CHECK(a == murmur3_128("hello", 0));
    CHECK(a != murmur3_128("hello", 1));
    CHECK(a != murmur3_128("hellp", 0));
    CHECK(a.hex().size() == 32);
    CHECK(murmur3_128("", 0).hex() == murmur3_128("", 0).hex());
    // mod distributes into range
    for (uint64_t p : {1ull, 7ull, 64ull})
        CHECK(murmur3_128("x", 3).mod(p) < p);
}

TEST_CASE("seed mixing separates shard streams") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(1, 5) == mix_seed(1, 5));
}
