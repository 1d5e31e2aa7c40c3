// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_TEXT_NORM_HPP
#define ARPREP_TEXT_NORM_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arprep/record.hpp"

namespace arprep::norm {

// Character-level normalization of Arabic tweet/news text. Two profiles:
// DedupKey produces canonical keys for duplicate detection (aggressive
// stripping), Pretrain produces the text that feeds segmentation and BPE
// (mentions/URLs/numbers masked, emojis kept).
enum class RuleId {
    kStripDiacritics,
    kStripKashida,
    kStripPunctuation,
    kNormalizeAlif,
    kNormalizeAlifMaqsoura,
    kNormalizeTaaMarbouta,
    kMapFarsiDecorated,
    kStripUrls,
    kStripMentions,
    kStripEmojis,
    kStripNumbers,
    kMaskMentions,
    kMaskUrls,
    kMaskNumbers,
    kSplitHashtags,
    kCapRepetition,
    kCollapseWhitespace,
};

std::string_view rule_name(RuleId id);

enum class ProfileName { kDedupKey, kPretrain };

// Replacement tokens for masked entities.
inline constexpr std::string_view kMentionToken = "@USERNAME";
inline constexpr std::string_view kUrlToken = "URL";
inline constexpr std::string_view kNumberToken = "NUM";

// Farsi/Urdu letter variants to Arabic base letters. Shipped as a builtin
// table mirrored by core/data/farsi_map.tsv so it can be audited or extended.
class FarsiMap {
public:
    static const FarsiMap& builtin();
    static FarsiMap load(const std::filesystem::path& file);

    std::optional<char32_t> lookup(char32_t cp) const;
    size_t size() const { return entries_.size(); }
    const std::vector<std::pair<char32_t, char32_t>>& entries() const { return entries_; }

private:
    explicit FarsiMap(std::vector<std::pair<char32_t, char32_t>> entries);
    std::vector<std::pair<char32_t, char32_t>> entries_;  // sorted by source codepoint
};

struct NormalizationProfile {
    ProfileName name;
    std::vector<RuleId> rules;  // applied in order; the order makes the profile idempotent

    static const NormalizationProfile& dedup_key();
    static const NormalizationProfile& pretrain();
    static const NormalizationProfile& by_name(std::string_view name);  // "dedup-key"|"pretrain"
};

// Single rule application. Pure, total on valid UTF-8, idempotent.
std::string apply_rule(RuleId id, std::string_view text);
std::string apply_rule(RuleId id, std::string_view text, const FarsiMap& farsi);

// Tokens starting with '#' lose the marker and split on '_'. Empty segments
// are dropped; non-hashtag input comes back as a single-element list.
std::vector<std::string> split_hashtag(std::string_view token);

class Normalizer {
public:
    explicit Normalizer(const NormalizationProfile& profile,
                        const FarsiMap& farsi = FarsiMap::builtin());

    std::string normalize(std::string_view text) const;
    std::string normalize(const TextRecord& record) const { return normalize(record.text); }

    const NormalizationProfile& profile() const { return profile_; }

private:
    NormalizationProfile profile_;
    const FarsiMap& farsi_;
};

}  // namespace arprep::norm

#endif  // ARPREP_TEXT_NORM_HPP
