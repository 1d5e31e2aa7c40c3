// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/text_norm.hpp"

#include <set>

#include "arprep/rng.hpp"
#include "arprep/unicode.hpp"
#include "doctest.h"
#include "support/corpus_gen.hpp"
#include "support/testutil.hpp"

using namespace arprep;
using namespace arprep::norm;

namespace {

uint64_t token_count(const std::string& s) {
    uint64_t n = 0;
    bool in_tok = false;
    for (char32_t c : uni::decode_utf8(s)) {
        bool sp = uni::is_space(c);
        if (!sp && !in_tok) ++n;
        in_tok = !sp;
    }
    return n;
}

std::u32string emoji_subsequence(const std::string& s) {
    std::u32string out;
    for (char32_t c : uni::decode_utf8(s))
        if (uni::is_emoji(c)) out.push_back(c);
    return out;
}

}  // namespace

TEST_CASE("letter mapping rules match their quoted examples") {
    CHECK(apply_rule(RuleId::kNormalizeAlif, "أإآ") == "ااا");
    CHECK(apply_rule(RuleId::kNormalizeAlifMaqsoura, "ى") == "ي");
    CHECK(apply_rule(RuleId::kNormalizeTaaMarbouta, "ة") == "ه");
    CHECK(apply_rule(RuleId::kMapFarsiDecorated, "پ") == "ب");
    CHECK(apply_rule(RuleId::kMapFarsiDecorated, "گ") == "ك");
    CHECK(apply_rule(RuleId::kCapRepetition, "cooooool") == "cool");
    // untargeted codepoints pass through
    CHECK(apply_rule(RuleId::kNormalizeAlif, "كتاب ابن") == "كتاب ابن");
}

TEST_CASE("strip rules") {
    CHECK(apply_rule(RuleId::kStripDiacritics, "مَرْحَبًا") == "مرحبا");
    CHECK(apply_rule(RuleId::kStripDiacritics, "مرحبا") == "مرحبا");  // fixed point
    CHECK(apply_rule(RuleId::kStripKashida, "كتـــاب") == "كتاب");
    CHECK(apply_rule(RuleId::kStripPunctuation, "a,b!c؟") == "abc");
    CHECK(apply_rule(RuleId::kStripUrls, "x http://t.co/abc y") == "x  y");
    CHECK(apply_rule(RuleId::kStripUrls, "x www.site.com y") == "x  y");
    CHECK(apply_rule(RuleId::kStripMentions, "hi @user bye") == "hi  bye");
    CHECK(apply_rule(RuleId::kStripEmojis, "عاش\U0001F602") == "عاش");
    CHECK(apply_rule(RuleId::kStripNumbers, "abc 123 ٤٥٦") == "abc  ");
}

TEST_CASE("mask rules substitute the literal tokens") {
    CHECK(apply_rule(RuleId::kMaskMentions, "@sam says") == "@USERNAME says");
    CHECK(apply_rule(RuleId::kMaskUrls, "see http://t.co/x now") == "see URL now");
    CHECK(apply_rule(RuleId::kMaskUrls, "see WWW.x.y now") == "see URL now");
    CHECK(apply_rule(RuleId::kMaskNumbers, "room 101") == "room NUM");
    CHECK(apply_rule(RuleId::kMaskNumbers, "٧٨٩") == "NUM");
    // masking is a fixed point
    CHECK(apply_rule(RuleId::kMaskMentions, "@USERNAME") == "@USERNAME");
    CHECK(apply_rule(RuleId::kMaskUrls, "URL") == "URL");
    CHECK(apply_rule(RuleId::kMaskNumbers, "NUM") == "NUM");
}

TEST_CASE("url runs stop at whitespace and at emoji") {
    CHECK(apply_rule(RuleId::kMaskUrls, "http://t.co/x\U0001F602") == "URL\U0001F602");
    CHECK(apply_rule(RuleId::kStripUrls, "http://t.co/x\U0001F602 y") == "\U0001F602 y");
}

TEST_CASE("split_hashtag") {
    CHECK(split_hashtag("#قطر") == std::vector<std::string>{"قطر"});
    CHECK(split_hashtag("#يوم_الجمعة") == std::vector<std::string>{"يوم", "الجمعة"});
    CHECK(split_hashtag("word") == std::vector<std::string>{"word"});
    CHECK(split_hashtag("#a__b") == std::vector<std::string>{"a", "b"});
    CHECK(split_hashtag("#") == std::vector<std::string>{});
}

TEST_CASE("pretrain profile composition") {
    Normalizer pretrain(NormalizationProfile::pretrain());
    CHECK(pretrain.normalize("@sam http://t.co/x 123 عاش") == "@USERNAME URL NUM عاش");
    CHECK(pretrain.normalize("#يوم_الجمعة") == "يوم الجمعة");
    CHECK(pretrain.normalize("جميييييل") == "جمييل");
    // emojis intact, even repeated ones
    CHECK(pretrain.normalize("\U0001F602\U0001F602\U0001F602 عاش") ==
          "\U0001F602\U0001F602\U0001F602 عاش");
    // punctuation survives pretraining text
    CHECK(pretrain.normalize("نعم، لا.") == "نعم، لا.");
}

TEST_CASE("dedup-key profile composition") {
    Normalizer key(NormalizationProfile::dedup_key());
    CHECK(key.normalize("") == "");
    // a tweet plus diacritics plus a URL keys identically to its base form
    std::string base = "مرحبا بالعالم يا ناس";
    std::string decorated = "مَرْحَبًا بالعالم يا ناس http://t.co/abc";
    CHECK(key.normalize(base) == key.normalize(decorated));
    CHECK(key.normalize("@user مرحبا \U0001F602 123!!") == "مرحبا");
}

TEST_CASE("dedup-key output alphabet exclusions") {
    Normalizer key(NormalizationProfile::dedup_key());
    DetRng rng(11);
    for (int i = 0; i < 2000; ++i) {
        std::string out = key.normalize(testsupport::random_unicode_string(rng));
        for (char32_t c : uni::decode_utf8(out)) {
            CAPTURE(static_cast<uint32_t>(c));
            CHECK(!uni::is_arabic_diacritic(c));
            CHECK(c != uni::kKashida);
            CHECK(!uni::is_punct_or_symbol(c));
            CHECK(!uni::is_emoji(c));
            CHECK(!uni::is_digit_cp(c));
        }
    }
}

TEST_CASE("profiles are idempotent on random unicode") {
    Normalizer key(NormalizationProfile::dedup_key());
    Normalizer pretrain(NormalizationProfile::pretrain());
    DetRng rng(12);
    for (int i = 0; i < 5000; ++i) {
        std::string s = testsupport::random_unicode_string(rng);
        std::string k1 = key.normalize(s);
        CHECK(key.normalize(k1) == k1);
        std::string p1 = pretrain.normalize(s);
        CHECK(pretrain.normalize(p1) == p1);
    }
}

TEST_CASE("every single rule is idempotent") {
    static const RuleId all[] = {
        RuleId::kStripDiacritics, RuleId::kStripKashida,    RuleId::kStripPunctuation,
        RuleId::kNormalizeAlif,   RuleId::kNormalizeAlifMaqsoura,
        RuleId::kNormalizeTaaMarbouta, RuleId::kMapFarsiDecorated,
        RuleId::kStripUrls,       RuleId::kStripMentions,   RuleId::kStripEmojis,
        RuleId::kStripNumbers,    RuleId::kMaskMentions,    RuleId::kMaskUrls,
        RuleId::kMaskNumbers,     RuleId::kSplitHashtags,   RuleId::kCapRepetition,
        RuleId::kCollapseWhitespace,
    };
    DetRng rng(13);
    for (int i = 0; i < 500; ++i) {
        std::string s = testsupport::random_unicode_string(rng);
        for (RuleId rule : all) {
            std::string once = apply_rule(rule, s);
            CAPTURE(rule_name(rule));
            CHECK(apply_rule(rule, once) == once);
        }
    }
}

TEST_CASE("pretrain preserves emoji codepoints bit-exactly") {
    Normalizer pretrain(NormalizationProfile::pretrain());
    DetRng rng(14);
    for (int i = 0; i < 2000; ++i) {
        std::string s = testsupport::random_unicode_string(rng);
        CHECK(emoji_subsequence(pretrain.normalize(s)) == emoji_subsequence(s));
    }
}

TEST_CASE("cap repetition bounds non-emoji runs and keeps order") {
    DetRng rng(15);
    for (int i = 0; i < 2000; ++i) {
        std::string s = testsupport::random_unicode_string(rng);
        std::u32string out = uni::decode_utf8(apply_rule(RuleId::kCapRepetition, s));
        size_t run = 0;
        for (size_t k = 0; k < out.size(); ++k) {
            run = (k > 0 && out[k] == out[k - 1]) ? run + 1 : 1;
            if (!uni::is_emoji(out[k])) CHECK(run <= 2);
        }
        // order preserved: output is a subsequence of the input
        std::u32string in = uni::decode_utf8(s);
        size_t j = 0;
        for (char32_t c : out) {
            while (j < in.size() && in[j] != c) ++j;
            CHECK(j < in.size());
            ++j;
        }
    }
}

TEST_CASE("normalization never invents tokens except by hashtag splitting") {
    Normalizer key(NormalizationProfile::dedup_key());
    Normalizer pretrain(NormalizationProfile::pretrain());
    DetRng rng(16);
    for (int i = 0; i < 2000; ++i) {
        std::string s = testsupport::random_unicode_string(rng);
        CHECK(token_count(key.normalize(s)) <= token_count(s));
        if (s.find('#') == std::string::npos)
            CHECK(token_count(pretrain.normalize(s)) <= token_count(s));
    }
}

TEST_CASE("farsi mapping table file mirrors the builtin table") {
    FarsiMap from_file = FarsiMap::load(std::filesystem::path(ARPREP_DATA_DIR) / "farsi_map.tsv");
    CHECK(from_file.entries() == FarsiMap::builtin().entries());
}

TEST_CASE("farsi map rejects non-idempotent tables") {
    auto dir = testsupport::make_temp_dir("farsimap");
    testsupport::write_file(dir / "bad.tsv", "پ\tب\nب\tت\n");  // target of پ is itself mapped
    CHECK_THROWS(FarsiMap::load(dir / "bad.tsv"));
}

TEST_CASE("record-level normalize uses the record text") {
    Normalizer pretrain(NormalizationProfile::pretrain());
    TextRecord rec{"1", "@sam عاش", Genre::kTweet, "twitter"};
    CHECK(pretrain.normalize(rec) == "@USERNAME عاش");
}
