// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/record.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace arprep {

std::string_view genre_name(Genre g) { return g == Genre::kTweet ? "tweet" : "formal"; }

std::optional<Genre> genre_from_name(std::string_view name) {
    if (name == "tweet") return Genre::kTweet;
    if (name == "formal") return Genre::kFormal;
    return std::nullopt;
}

std::optional<RecordFormat> record_format_from_name(std::string_view name) {
    if (name == "raw") return RecordFormat::kRaw;
    if (name == "jsonl") return RecordFormat::kJsonl;
    return std::nullopt;
}

std::string serialize_record(const TextRecord& rec, RecordFormat format) {
    if (format == RecordFormat::kRaw) return rec.text;
    nlohmann::json j{{"id", rec.id},
                     {"text", rec.text},
                     {"genre", genre_name(rec.genre)},
                     {"source", rec.source}};
    return j.dump();
}

TextRecord parse_record_line(std::string_view line, RecordFormat format, uint64_t line_no,
                             Genre default_genre, std::string_view default_source) {
    if (format == RecordFormat::kRaw) {
        return TextRecord{std::to_string(line_no), std::string(line), default_genre,
                          std::string(default_source)};
    }
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text"))
        throw std::runtime_error("record line " + std::to_string(line_no) +
                                 ": not a valid {id, text, genre, source} object");
    TextRecord rec;
    rec.id = j.value("id", std::to_string(line_no));
    rec.text = j.at("text").get<std::string>();
    rec.source = j.value("source", std::string(default_source));
    auto g = genre_from_name(j.value("genre", std::string(genre_name(default_genre))));
    if (!g)
        throw std::runtime_error("record line " + std::to_string(line_no) +
                                 ": unknown genre (want tweet|formal)");
    rec.genre = *g;
    return rec;
}

RecordReader::RecordReader(std::istream& in, RecordFormat format, Genre default_genre,
                           std::string default_source)
    : in_(in), format_(format), default_genre_(default_genre),
      default_source_(std::move(default_source)) {}

bool RecordReader::next(TextRecord& out) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    out = parse_record_line(line, format_, line_no_, default_genre_, default_source_);
    return true;
}

void RecordWriter::write(const TextRecord& rec) {
    out_ << serialize_record(rec, format_) << '\n';
    ++count_;
}

}  // namespace arprep
