// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/segment.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "arprep/unicode.hpp"

namespace arprep::seg {

namespace uni = arprep::uni;

std::string SegmentedWord::join() const {
    std::string out;
    for (const auto& p : prefixes) out += p;
    out += stem;
    for (const auto& s : suffixes) out += s;
    return out;
}

namespace {

// Longest first, ties by codepoint order, so greedy matching is deterministic.
std::vector<std::u32string> compile_affixes(const std::vector<std::string>& affixes) {
    std::vector<std::u32string> out;
    out.reserve(affixes.size());
    for (const auto& a : affixes) out.push_back(uni::decode_utf8(a));
    std::sort(out.begin(), out.end(), [](const std::u32string& a, const std::u32string& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return out;
}

bool all_arabic_letters(const std::u32string& w) {
    return !w.empty() && std::all_of(w.begin(), w.end(), uni::is_arabic_letter);
}

}  // namespace

const AffixTable& AffixTable::builtin() {
    static const AffixTable table{
        {"و",  "ف",  "ب",   "ل",   "ال",  "لل",  "وال", "فال", "بال", "كال",
         "ولل", "فلل", "وب",  "فب",  "ول",  "فل",  "وبال", "فبال"},
        {"ها", "هم", "هن", "هما", "كم", "كن", "كما", "نا", "ني", "ه", "ك", "ي"},
        /*min_stem_len=*/2,
        /*max_prefixes=*/2,
        /*max_suffixes=*/2,
    };
    return table;
}

AffixTable AffixTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("affix table: cannot open " + file.string());
    AffixTable table;
    table.prefixes.clear();
    table.suffixes.clear();
    std::vector<std::string>* section = nullptr;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line == "[prefixes]") {
            section = &table.prefixes;
        } else if (line == "[suffixes]") {
            section = &table.suffixes;
        } else if (!section) {
            throw std::runtime_error("affix table: " + file.string() + ":" +
                                     std::to_string(line_no) +
                                     ": entry before [prefixes]/[suffixes] header");
        } else {
            section->push_back(line);
        }
    }
    if (table.prefixes.empty() && table.suffixes.empty())
        throw std::runtime_error("affix table: " + file.string() + " defines no affixes");
    return table;
}

Segmenter::Segmenter(const AffixTable& table)
    : table_(table), prefixes_(compile_affixes(table.prefixes)),
      suffixes_(compile_affixes(table.suffixes)) {
    for (const auto& a : prefixes_)
        if (a.empty()) throw std::invalid_argument("affix table: empty prefix entry");
    for (const auto& a : suffixes_)
        if (a.empty()) throw std::invalid_argument("affix table: empty suffix entry");
    if (table_.min_stem_len < 2)
        throw std::invalid_argument("affix table: min_stem_len must be >= 2");
}

SegmentedWord Segmenter::word(std::string_view word) const {
    std::u32string w = uni::decode_utf8(word);
    const size_t min_stem = static_cast<size_t>(table_.min_stem_len);

    SegmentedWord out;
    size_t lo = 0;
    size_t hi = w.size();

    for (int k = 0; k < table_.max_prefixes; ++k) {
        const std::u32string* hit = nullptr;
        for (const auto& p : prefixes_) {
            if (hi - lo < p.size() + min_stem) continue;
            if (w.compare(lo, p.size(), p) == 0) {
                hit = &p;
                break;
            }
        }
        if (!hit) break;
        out.prefixes.push_back(uni::encode_utf8(*hit));
        lo += hit->size();
    }
    for (int k = 0; k < table_.max_suffixes; ++k) {
        const std::u32string* hit = nullptr;
        for (const auto& s : suffixes_) {
            if (hi - lo < s.size() + min_stem) continue;
            if (w.compare(hi - s.size(), s.size(), s) == 0) {
                hit = &s;
                break;
            }
        }
        if (!hit) break;
        out.suffixes.push_back(uni::encode_utf8(*hit));
        hi -= hit->size();
    }
    std::reverse(out.suffixes.begin(), out.suffixes.end());
    out.stem = uni::encode_utf8(std::u32string_view(w).substr(lo, hi - lo));
    return out;
}

std::string Segmenter::line(std::string_view line, MarkerStyle style) const {
    std::string out;
    out.reserve(line.size() * 2);
    size_t i = 0;
    bool first = true;
    while (i < line.size()) {
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) {
            std::string_view token = line.substr(start, i - start);
            if (!first) out.push_back(' ');
            first = false;
            std::u32string cps = uni::decode_utf8(token);
            if (all_arabic_letters(cps)) {
                out += render_segments(word(token), style);
            } else {
                out += token;
            }
        }
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    }
    return out;
}

SegmentedWord segment_word(std::string_view word, const AffixTable& table) {
    return Segmenter(table).word(word);
}

std::string render_segments(const SegmentedWord& seg, MarkerStyle style) {
    std::string out;
    for (const auto& p : seg.prefixes) {
        out += p;
        if (style == MarkerStyle::kPlusMarks) out.push_back('+');
        out.push_back(' ');
    }
    out += seg.stem;
    for (const auto& s : seg.suffixes) {
        out.push_back(' ');
        if (style == MarkerStyle::kPlusMarks) out.push_back('+');
        out += s;
    }
    return out;
}

SegmentedWord parse_segments(std::string_view rendered, MarkerStyle style) {
    if (style == MarkerStyle::kSpaceJoined)
        throw std::invalid_argument(
            "space_joined rendering is not uniquely parseable; use plus_marks");
    SegmentedWord out;
    bool have_stem = false;
    size_t i = 0;
    while (i < rendered.size()) {
        size_t start = i;
        while (i < rendered.size() && rendered[i] != ' ') ++i;
        std::string_view tok = rendered.substr(start, i - start);
        if (i < rendered.size()) ++i;
        if (tok.empty()) continue;
        if (tok.size() > 1 && tok.back() == '+' && !have_stem) {
            out.prefixes.emplace_back(tok.substr(0, tok.size() - 1));
        } else if (tok.size() > 1 && tok.front() == '+' && have_stem) {
            out.suffixes.emplace_back(tok.substr(1));
        } else if (!have_stem) {
            out.stem = std::string(tok);
            have_stem = true;
        } else {
            throw std::invalid_argument("plus_marks parse: unexpected token '" +
                                        std::string(tok) + "' after stem");
        }
    }
    if (!have_stem) throw std::invalid_argument("plus_marks parse: no stem token");
    return out;
}

uint64_t segment_via_external(std::istream& lines, const std::string& command,
                              const std::function<void(std::string_view)>& sink,
                              int timeout_ms) {
    LineFilter filter(command, timeout_ms);
    return filter.run(lines, sink);
}

}  // namespace arprep::seg
