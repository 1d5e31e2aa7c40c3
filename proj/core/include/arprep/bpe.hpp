// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_BPE_HPP
#define ARPREP_BPE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace arprep::bpe {

// Special ids occupy a fixed prefix of every vocabulary. The last three are
// the literal replacement tokens the Pretrain normalization profile emits.
enum SpecialId : int32_t {
    kPad = 0,
    kUnk = 1,
    kCls = 2,
    kSep = 3,
    kMask = 4,
    kMention = 5,  // @USERNAME
    kUrl = 6,      // URL
    kNum = 7,      // NUM
};
inline constexpr int32_t kNumSpecials = 8;
const std::array<std::string_view, kNumSpecials>& special_literals();

// Word-final subwords carry this marker suffix in their serialized form.
inline constexpr std::string_view kWordMarker = "</w>";

// [UNK] decodes to this glyph rather than its vocab literal.
inline constexpr std::string_view kUnkGlyph = "\xEF\xBF\xBD";  // U+FFFD

struct TokenSequence {
    std::vector<int32_t> ids;
    std::vector<bool> is_continuation;  // parallel; true on non-word-initial subwords
};

struct BpeTrainConfig {
    int32_t target_vocab = 64000;
    int64_t min_frequency = 2;
    unsigned workers = 1;
};

// Byte-pair encoding model: an ordered merge list plus the derived
// vocabulary. Training is greedy highest-count pair selection; ties break
// lexicographically on the serialized (left, right) pair, so a corpus and a
// config always produce the same model, bit for bit.
class BpeModel {
public:
    static BpeModel train(std::istream& corpus, const BpeTrainConfig& cfg);
    static BpeModel train(const std::vector<std::string>& lines, const BpeTrainConfig& cfg);

    TokenSequence encode(std::string_view line) const;
    std::string decode(const TokenSequence& seq) const;
    std::string decode(const std::vector<int32_t>& ids) const;

    // Writes merges.txt and vocab.txt under dir; load() restores the model
    // bit-exactly (save-load-save is byte-identical).
    void save(const std::filesystem::path& dir) const;
    static BpeModel load(const std::filesystem::path& dir);

    int32_t vocab_size() const { return static_cast<int32_t>(vocab_.size()); }
    size_t merge_count() const { return merges_.size(); }
    // Serialized (left, right) pairs in learned order.
    const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
    const std::string& token_of(int32_t id) const { return vocab_.at(static_cast<size_t>(id)); }
    int32_t id_of(std::string_view token) const;  // -1 when absent

    // True when the subword closes a word (word-final marker or special).
    bool ends_word(int32_t id) const { return word_final_.at(static_cast<size_t>(id)); }

private:
    BpeModel() = default;
    void index_vocab();
    void build_ranks();
    std::vector<int32_t> encode_word(std::string_view word) const;

    std::vector<std::string> vocab_;  // id -> serialized token
    std::vector<bool> word_final_;
    std::unordered_map<std::string, int32_t> vocab_index_;
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<std::string, int32_t> merge_rank_;  // "left right" -> rank
};

}  // namespace arprep::bpe

#endif  // ARPREP_BPE_HPP
