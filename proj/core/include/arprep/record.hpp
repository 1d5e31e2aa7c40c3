// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_RECORD_HPP
#define ARPREP_RECORD_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace arprep {

enum class Genre { kTweet, kFormal };

std::string_view genre_name(Genre g);
std::optional<Genre> genre_from_name(std::string_view name);

// One input unit: a tweet or a formal-text sentence.
struct TextRecord {
    std::string id;
    std::string text;
    Genre genre = Genre::kTweet;
    std::string source;
};

enum class RecordFormat { kRaw, kJsonl };

std::optional<RecordFormat> record_format_from_name(std::string_view name);

// Serialized form: raw is the text itself, jsonl is one JSON object per line
// with fields {id, text, genre, source}.
std::string serialize_record(const TextRecord& rec, RecordFormat format);
TextRecord parse_record_line(std::string_view line, RecordFormat format, uint64_t line_no,
                             Genre default_genre, std::string_view default_source);

// Streams newline-delimited records. Raw lines get 1-based ordinals as ids.
class RecordReader {
public:
    RecordReader(std::istream& in, RecordFormat format, Genre default_genre = Genre::kTweet,
                 std::string default_source = "input");

    bool next(TextRecord& out);
    uint64_t lines_read() const { return line_no_; }

private:
    std::istream& in_;
    RecordFormat format_;
    Genre default_genre_;
    std::string default_source_;
    uint64_t line_no_ = 0;
};

class RecordWriter {
public:
    RecordWriter(std::ostream& out, RecordFormat format) : out_(out), format_(format) {}

    void write(const TextRecord& rec);
    uint64_t records_written() const { return count_; }

private:
    std::ostream& out_;
    RecordFormat format_;
    uint64_t count_ = 0;
};

}  // namespace arprep

#endif  // ARPREP_RECORD_HPP
