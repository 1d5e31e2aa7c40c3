// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_UNICODE_HPP
#define ARPREP_UNICODE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace arprep::uni {

// Decode errors are replaced with U+FFFD; encode rejects surrogates and
// out-of-range values the same way. All pipeline text is UTF-8 end to end,
// codepoint vectors exist only inside individual transforms.
inline constexpr char32_t kReplacement = 0xFFFD;

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Reads one codepoint starting at byte offset i, advancing i past it.
char32_t next_codepoint(std::string_view s, size_t& i);

bool is_valid_utf8(std::string_view s);
size_t codepoint_count(std::string_view s);

// Character classes used by the normalizer and segmenter.
bool is_punct_or_symbol(char32_t cp);  // general categories P* and S*, emoji excluded
bool is_emoji(char32_t cp);            // pictographs plus ZWJ/VS16-style joiners
bool is_space(char32_t cp);            // Zs plus ASCII control whitespace
bool is_arabic_letter(char32_t cp);
bool is_arabic_diacritic(char32_t cp);  // U+064B..U+065F and U+0670
bool is_digit_cp(char32_t cp);          // ASCII 0-9 and Arabic-Indic U+0660..U+0669

inline constexpr char32_t kKashida = 0x0640;

}  // namespace arprep::uni

#endif  // ARPREP_UNICODE_HPP
