// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <istream>
#include <stdexcept>

#include "arprep/pipeline.hpp"
#include "arprep/unicode.hpp"
#include "json.hpp"

namespace arprep::pipeline {

namespace {

uint64_t whitespace_tokens(std::string_view text) {
    uint64_t n = 0;
    bool in_token = false;
    for (char c : text) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++n;
        in_token = !space;
    }
    return n;
}

// Token count after clitic segmentation: morph count for Arabic-script
// tokens, 1 for everything else. No strings are built.
uint64_t post_segmentation_tokens(std::string_view text, const seg::Segmenter& segmenter) {
    uint64_t n = 0;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) continue;
        std::string_view token = text.substr(start, i - start);
        std::u32string cps = uni::decode_utf8(token);
        bool arabic = !cps.empty();
        for (char32_t c : cps)
            if (!uni::is_arabic_letter(c)) arabic = false;
        if (!arabic) {
            ++n;
            continue;
        }
        seg::SegmentedWord w = segmenter.word(token);
        n += 1 + w.prefixes.size() + w.suffixes.size();
    }
    return n;
}

}  // namespace

void CorpusStats::merge(const CorpusStats& o) {
    total.merge(o.total);
    for (const auto& [genre, s] : o.per_genre) per_genre[genre].merge(s);
}

std::string CorpusStats::to_json() const {
    nlohmann::json j{{"bytes", total.bytes}, {"lines", total.lines}, {"tokens", total.tokens}};
    nlohmann::json genres = nlohmann::json::object();
    for (const auto& [genre, s] : per_genre)
        genres[genre] = {{"bytes", s.bytes}, {"lines", s.lines}, {"tokens", s.tokens}};
    j["per_genre"] = genres;
    return j.dump(2);
}

CorpusStats compute_stats(std::istream& in, RecordFormat format, TokenizerKind tokenizer,
                          Genre default_genre) {
    RecordReader reader(in, format, default_genre);
    seg::Segmenter segmenter;
    CorpusStats stats;
    TextRecord rec;
    while (reader.next(rec)) {
        GenreStats row;
        row.lines = 1;
        row.bytes = rec.text.size() + 1;  // newline-terminated record
        row.tokens = tokenizer == TokenizerKind::kWhitespace
                         ? whitespace_tokens(rec.text)
                         : post_segmentation_tokens(rec.text, segmenter);
        stats.total.merge(row);
        stats.per_genre[std::string(genre_name(rec.genre))].merge(row);
    }
    return stats;
}

CorpusStats compute_stats_file(const std::filesystem::path& path, RecordFormat format,
                               TokenizerKind tokenizer, Genre default_genre) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("stats: cannot open " + path.string());
    return compute_stats(in, format, tokenizer, default_genre);
}

}  // namespace arprep::pipeline
