// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/text_norm.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "arprep/unicode.hpp"

namespace arprep::norm {

namespace uni = arprep::uni;

namespace {

constexpr char32_t kAlif = 0x0627;          // ا
constexpr char32_t kAlifMadda = 0x0622;     // آ
constexpr char32_t kAlifHamzaAbove = 0x0623;  // أ
constexpr char32_t kAlifHamzaBelow = 0x0625;  // إ
constexpr char32_t kAlifMaqsoura = 0x0649;  // ى
constexpr char32_t kYa = 0x064A;            // ي
constexpr char32_t kTaaMarbouta = 0x0629;   // ة
constexpr char32_t kHaa = 0x0647;           // ه

bool ascii_alpha(char32_t c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool ascii_alnum(char32_t c) { return ascii_alpha(c) || (c >= '0' && c <= '9'); }

// Twitter-style handle characters.
bool handle_char(char32_t c) { return ascii_alnum(c) || c == '_'; }

bool scheme_char(char32_t c) {
    return ascii_alnum(c) || c == '+' || c == '-' || c == '.';
}

char32_t ascii_lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + 32 : c; }

// A URL run ends at whitespace, and also at an emoji: tweets commonly glue an
// emoji straight onto a link, and those codepoints must survive the Pretrain
// profile untouched.
size_t url_run_end(const std::u32string& s, size_t start) {
    size_t j = start;
    while (j < s.size() && !uni::is_space(s[j]) && !uni::is_emoji(s[j])) ++j;
    return j;
}

// Returns the end of a URL starting exactly at i, or npos. Accepts
// "<scheme>://" and "www." prefixes.
size_t match_url(const std::u32string& s, size_t i) {
    const size_t n = s.size();
    if (i + 3 < n && ascii_alpha(s[i])) {
        size_t j = i + 1;
        while (j < n && scheme_char(s[j])) ++j;
        if (j + 2 < n && s[j] == ':' && s[j + 1] == '/' && s[j + 2] == '/')
            return url_run_end(s, j + 3);
    }
    static constexpr char32_t kWww[] = {'w', 'w', 'w', '.'};
    if (i + 4 <= n) {
        bool www = true;
        for (size_t k = 0; k < 4; ++k)
            if (ascii_lower(s[i + k]) != kWww[k]) www = false;
        if (www) return url_run_end(s, i + 4);
    }
    return std::u32string::npos;
}

size_t match_mention(const std::u32string& s, size_t i) {
    if (s[i] != '@' || i + 1 >= s.size() || !handle_char(s[i + 1])) return std::u32string::npos;
    size_t j = i + 1;
    while (j < s.size() && handle_char(s[j])) ++j;
    return j;
}

size_t match_number(const std::u32string& s, size_t i) {
    if (!uni::is_digit_cp(s[i])) return std::u32string::npos;
    size_t j = i;
    while (j < s.size() && uni::is_digit_cp(s[j])) ++j;
    return j;
}

using Matcher = size_t (*)(const std::u32string&, size_t);

std::u32string replace_matches(const std::u32string& s, Matcher match,
                               std::u32string_view replacement) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        size_t end = match(s, i);
        if (end != std::u32string::npos) {
            out.append(replacement);
            i = end;
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

template <class Pred>
std::u32string erase_if_cp(const std::u32string& s, Pred pred) {
    std::u32string out;
    out.reserve(s.size());
    for (char32_t c : s)
        if (!pred(c)) out.push_back(c);
    return out;
}

std::u32string map_cp(const std::u32string& s, char32_t (*f)(char32_t)) {
    std::u32string out(s);
    std::transform(out.begin(), out.end(), out.begin(), f);
    return out;
}

// Runs longer than two of the same codepoint are truncated. Emojis are
// exempt: the pretraining profile leaves them intact.
std::u32string cap_repetition(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    size_t run = 0;
    for (char32_t c : s) {
        run = (!out.empty() && out.back() == c) ? run + 1 : 1;
        if (run <= 2 || uni::is_emoji(c)) out.push_back(c);
    }
    return out;
}

std::u32string collapse_whitespace(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char32_t c : s) {
        if (uni::is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::u32string split_hashtags_in_string(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (uni::is_space(s[i])) {
            out.push_back(s[i++]);
            continue;
        }
        size_t j = i;
        while (j < s.size() && !uni::is_space(s[j])) ++j;
        if (s[i] == '#') {
            // Drop every '#', turn '_' into token breaks.
            for (size_t k = i; k < j; ++k) {
                if (s[k] == '#') continue;
                out.push_back(s[k] == '_' ? ' ' : s[k]);
            }
        } else {
            out.append(s, i, j - i);
        }
        i = j;
    }
    return out;
}

std::u32string to_u32(std::string_view sv) { return uni::decode_utf8(sv); }

std::u32string apply_rule_u32(RuleId id, const std::u32string& s, const FarsiMap& farsi) {
    switch (id) {
        case RuleId::kStripDiacritics:
            return erase_if_cp(s, uni::is_arabic_diacritic);
        case RuleId::kStripKashida:
            return erase_if_cp(s, [](char32_t c) { return c == uni::kKashida; });
        case RuleId::kStripPunctuation:
            return erase_if_cp(s, uni::is_punct_or_symbol);
        case RuleId::kNormalizeAlif:
            return map_cp(s, [](char32_t c) {
                return (c == kAlifMadda || c == kAlifHamzaAbove || c == kAlifHamzaBelow) ? kAlif
                                                                                         : c;
            });
        case RuleId::kNormalizeAlifMaqsoura:
            return map_cp(s, [](char32_t c) { return c == kAlifMaqsoura ? kYa : c; });
        case RuleId::kNormalizeTaaMarbouta:
            return map_cp(s, [](char32_t c) { return c == kTaaMarbouta ? kHaa : c; });
        case RuleId::kMapFarsiDecorated: {
            std::u32string out(s);
            for (char32_t& c : out)
                if (auto m = farsi.lookup(c)) c = *m;
            return out;
        }
        case RuleId::kStripUrls:
            return replace_matches(s, match_url, U"");
        case RuleId::kStripMentions:
            return replace_matches(s, match_mention, U"");
        case RuleId::kStripEmojis:
            return erase_if_cp(s, uni::is_emoji);
        case RuleId::kStripNumbers:
            return replace_matches(s, match_number, U"");
        case RuleId::kMaskMentions:
            return replace_matches(s, match_mention, U"@USERNAME");
        case RuleId::kMaskUrls:
            return replace_matches(s, match_url, U"URL");
        case RuleId::kMaskNumbers:
            return replace_matches(s, match_number, U"NUM");
        case RuleId::kSplitHashtags:
            return split_hashtags_in_string(s);
        case RuleId::kCapRepetition:
            return cap_repetition(s);
        case RuleId::kCollapseWhitespace:
            return collapse_whitespace(s);
    }
    throw std::logic_error("unhandled rule id");
}

}  // namespace

std::string_view rule_name(RuleId id) {
    switch (id) {
        case RuleId::kStripDiacritics: return "StripDiacritics";
        case RuleId::kStripKashida: return "StripKashida";
        case RuleId::kStripPunctuation: return "StripPunctuation";
        case RuleId::kNormalizeAlif: return "NormalizeAlif";
        case RuleId::kNormalizeAlifMaqsoura: return "NormalizeAlifMaqsoura";
        case RuleId::kNormalizeTaaMarbouta: return "NormalizeTaaMarbouta";
        case RuleId::kMapFarsiDecorated: return "MapFarsiDecorated";
        case RuleId::kStripUrls: return "StripUrls";
        case RuleId::kStripMentions: return "StripMentions";
        case RuleId::kStripEmojis: return "StripEmojis";
        case RuleId::kStripNumbers: return "StripNumbers";
        case RuleId::kMaskMentions: return "MaskMentions";
        case RuleId::kMaskUrls: return "MaskUrls";
        case RuleId::kMaskNumbers: return "MaskNumbers";
        case RuleId::kSplitHashtags: return "SplitHashtags";
        case RuleId::kCapRepetition: return "CapRepetition";
        case RuleId::kCollapseWhitespace: return "CollapseWhitespace";
    }
    return "?";
}

FarsiMap::FarsiMap(std::vector<std::pair<char32_t, char32_t>> entries)
    : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (const auto& [from, to] : entries_) {
        if (lookup(to))
            throw std::runtime_error("farsi map: target of " + uni::encode_utf8({&from, 1}) +
                                     " is itself mapped; mapping would not be idempotent");
    }
}

const FarsiMap& FarsiMap::builtin() {
    static const FarsiMap map({
        {0x067E, 0x0628},  // پ -> ب
        {0x0686, 0x062C},  // چ -> ج
        {0x0698, 0x0632},  // ژ -> ز
        {0x06AF, 0x0643},  // گ -> ك
        {0x06A4, 0x0641},  // ڤ -> ف
        {0x06A8, 0x0642},  // ڨ -> ق
        {0x06A9, 0x0643},  // ک -> ك
        {0x06AA, 0x0643},  // ڪ -> ك
        {0x06AB, 0x0643},  // ګ -> ك
        {0x06AD, 0x0643},  // ڭ -> ك
        {0x06CC, 0x064A},  // ی -> ي
        {0x06D2, 0x064A},  // ے -> ي
        {0x06D3, 0x064A},  // ۓ -> ي
        {0x06C1, 0x0647},  // ہ -> ه
        {0x06BE, 0x0647},  // ھ -> ه
        {0x06C0, 0x0647},  // ۀ -> ه
        {0x06D5, 0x0647},  // ە -> ه
        {0x0679, 0x062A},  // ٹ -> ت
        {0x0688, 0x062F},  // ڈ -> د
        {0x0691, 0x0631},  // ڑ -> ر
        {0x06BA, 0x0646},  // ں -> ن
        {0x06CB, 0x0648},  // ۋ -> و
        {0x06C6, 0x0648},  // ۆ -> و
        {0x06C7, 0x0648},  // ۇ -> و
        {0x06C8, 0x0648},  // ۈ -> و
    });
    return map;
}

FarsiMap FarsiMap::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("farsi map: cannot open " + file.string());
    std::vector<std::pair<char32_t, char32_t>> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("farsi map: " + file.string() + ":" +
                                     std::to_string(line_no) + ": expected <from>TAB<to>");
        std::u32string from = uni::decode_utf8(std::string_view(line).substr(0, tab));
        std::u32string to = uni::decode_utf8(std::string_view(line).substr(tab + 1));
        if (from.size() != 1 || to.size() != 1)
            throw std::runtime_error("farsi map: " + file.string() + ":" +
                                     std::to_string(line_no) +
                                     ": each column must be a single codepoint");
        entries.emplace_back(from[0], to[0]);
    }
    return FarsiMap(std::move(entries));
}

std::optional<char32_t> FarsiMap::lookup(char32_t cp) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), cp,
                               [](const auto& e, char32_t c) { return e.first < c; });
    if (it != entries_.end() && it->first == cp) return it->second;
    return std::nullopt;
}

// Rule order is fixed per profile: letter mappings, then diacritic/kashida
// strips, then the pattern rules (a stripped mark may expose a mention or
// URL, so patterns must run after the strips or a second pass would find new
// matches), then SplitHashtags, CapRepetition, CollapseWhitespace. This
// order makes each profile idempotent.
const NormalizationProfile& NormalizationProfile::dedup_key() {
    static const NormalizationProfile p{
        ProfileName::kDedupKey,
        {RuleId::kNormalizeAlif, RuleId::kNormalizeAlifMaqsoura, RuleId::kNormalizeTaaMarbouta,
         RuleId::kMapFarsiDecorated, RuleId::kStripDiacritics, RuleId::kStripKashida,
         RuleId::kStripUrls, RuleId::kStripMentions, RuleId::kStripEmojis,
         RuleId::kStripNumbers, RuleId::kStripPunctuation, RuleId::kCapRepetition,
         RuleId::kCollapseWhitespace}};
    return p;
}

// Inside pretrain, SplitHashtags runs before the masks ('#' removal can butt
// a '@' against following text) and mentions mask last: the URL/NUM
// replacement literals are ASCII letters, which the mention pattern treats
// as handle characters, so an earlier mention pass would find new matches on
// a second application.
const NormalizationProfile& NormalizationProfile::pretrain() {
    static const NormalizationProfile p{
        ProfileName::kPretrain,
        {RuleId::kMapFarsiDecorated, RuleId::kStripDiacritics, RuleId::kStripKashida,
         RuleId::kSplitHashtags, RuleId::kMaskUrls, RuleId::kMaskNumbers,
         RuleId::kMaskMentions, RuleId::kCapRepetition, RuleId::kCollapseWhitespace}};
    return p;
}

const NormalizationProfile& NormalizationProfile::by_name(std::string_view name) {
    if (name == "dedup-key") return dedup_key();
    if (name == "pretrain") return pretrain();
    throw std::invalid_argument("unknown profile '" + std::string(name) +
                                "' (want dedup-key|pretrain)");
}

std::string apply_rule(RuleId id, std::string_view text) {
    return apply_rule(id, text, FarsiMap::builtin());
}

std::string apply_rule(RuleId id, std::string_view text, const FarsiMap& farsi) {
    return uni::encode_utf8(apply_rule_u32(id, to_u32(text), farsi));
}

std::vector<std::string> split_hashtag(std::string_view token) {
    if (token.empty() || token[0] != '#') return {std::string(token)};
    std::vector<std::string> out;
    std::string current;
    for (char32_t c : to_u32(token)) {
        if (c == '#') continue;
        if (c == '_') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            uni::append_utf8(current, c);
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

Normalizer::Normalizer(const NormalizationProfile& profile, const FarsiMap& farsi)
    : profile_(profile), farsi_(farsi) {}

std::string Normalizer::normalize(std::string_view text) const {
    std::u32string s = to_u32(text);
    for (RuleId id : profile_.rules) s = apply_rule_u32(id, s, farsi_);
    return uni::encode_utf8(s);
}

}  // namespace arprep::norm
