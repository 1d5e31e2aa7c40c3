// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/unicode.hpp"

#include <algorithm>

namespace arprep::uni {

namespace {

struct CpRange {
    char32_t lo;
    char32_t hi;
};

#include "unicode_tables.inc"

// Pictographic blocks stripped by the dedup profile and left intact by the
// pretraining profile. VS15/VS16, the ZWJ and the combining keycap travel
// with emoji sequences, so they are classed as emoji too.
constexpr CpRange kEmojiRanges[] = {
    {0x200D, 0x200D},   {0x20E3, 0x20E3},   {0x2600, 0x27BF},
    {0x2B00, 0x2BFF},   {0xFE0E, 0xFE0F},   {0x1F000, 0x1F0FF},
    {0x1F1E6, 0x1F1FF}, {0x1F300, 0x1F5FF}, {0x1F600, 0x1F64F},
    {0x1F680, 0x1F6FF}, {0x1F700, 0x1F77F}, {0x1F780, 0x1F8FF},
    {0x1F900, 0x1F9FF}, {0x1FA00, 0x1FAFF},
};

template <size_t N>
bool in_ranges(const CpRange (&ranges)[N], char32_t cp) {
    auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                               [](char32_t c, const CpRange& r) { return c < r.lo; });
    return it != std::begin(ranges) && cp <= std::prev(it)->hi;
}

}  // namespace

char32_t next_codepoint(std::string_view s, size_t& i) {
    const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k < len; ++k) {
        if ((byte(i + k) & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    // Reject overlongs, surrogates and values past U+10FFFF.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacement;
    }
    i += len;
    return cp;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) out.push_back(next_codepoint(s, i));
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacement;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size() * 2);
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

bool is_valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        size_t before = i;
        char32_t cp = next_codepoint(s, i);
        if (cp == kReplacement && (i - before != 3 || s.substr(before, 3) != "\xEF\xBF\xBD"))
            return false;
    }
    return true;
}

size_t codepoint_count(std::string_view s) {
    size_t n = 0, i = 0;
    while (i < s.size()) {
        next_codepoint(s, i);
        ++n;
    }
    return n;
}

bool is_emoji(char32_t cp) { return in_ranges(kEmojiRanges, cp); }

bool is_punct_or_symbol(char32_t cp) {
    return in_ranges(kPunctSymbolRanges, cp) && !is_emoji(cp);
}

bool is_space(char32_t cp) {
    if (cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0x85) return true;
    return in_ranges(kSpaceSeparatorRanges, cp);
}

bool is_arabic_letter(char32_t cp) { return in_ranges(kArabicLetterRanges, cp); }

bool is_arabic_diacritic(char32_t cp) {
    return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670;
}

bool is_digit_cp(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 0x0660 && cp <= 0x0669);
}

}  // namespace arprep::uni
