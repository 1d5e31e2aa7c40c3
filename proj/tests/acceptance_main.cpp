// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails or overruns its
// time budget.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "arprep/bpe.hpp"
#include "arprep/dedup.hpp"
#include "arprep/evalboard.hpp"
#include "arprep/mlm.hpp"
#include "arprep/pipeline.hpp"
#include "arprep/rng.hpp"
#include "arprep/segment.hpp"
#include "arprep/text_norm.hpp"
#include "arprep/unicode.hpp"
#include "support/corpus_gen.hpp"
#include "support/reference_bpe.hpp"
#include "support/testutil.hpp"

using namespace arprep;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

void require_eq_str(const std::string& got, const std::string& want, const std::string& what) {
    if (got != want) throw Failure(what + ": got '" + got + "', want '" + want + "'");
}

// ---------------------------------------------------------------- C1
void c1_normalization_golden() {
    using namespace arprep::norm;
    require_eq_str(apply_rule(RuleId::kNormalizeAlif, "أإآ"), "ااا", "alif forms");
    require_eq_str(apply_rule(RuleId::kNormalizeAlifMaqsoura, "ى"), "ي", "alif maqsoura");
    require_eq_str(apply_rule(RuleId::kNormalizeTaaMarbouta, "ة"), "ه", "taa marbouta");
    require_eq_str(apply_rule(RuleId::kMapFarsiDecorated, "پ"), "ب", "farsi peh");
    require_eq_str(apply_rule(RuleId::kMapFarsiDecorated, "گ"), "ك", "farsi gaf");
    require_eq_str(apply_rule(RuleId::kCapRepetition, "cooooool"), "cool", "repetition cap");
    require_eq_str(apply_rule(RuleId::kStripDiacritics, "مَرْحَبًا"), "مرحبا", "diacritics");
    require_eq_str(apply_rule(RuleId::kStripKashida, "كتـــاب"), "كتاب", "kashida");

    Normalizer pretrain(NormalizationProfile::pretrain());
    require_eq_str(pretrain.normalize("@sam http://t.co/x 123 عاش"), "@USERNAME URL NUM عاش",
                   "mask substitution tokens");
    require_eq_str(pretrain.normalize("#يوم_الجمعة"), "يوم الجمعة", "hashtag split");
    require_eq_str(pretrain.normalize("عاش 😂🙏😂 الجميع"), "عاش 😂🙏😂 الجميع",
                   "emoji preserved under pretrain");
}

// ---------------------------------------------------------------- C2
void c2_idempotence() {
    using namespace arprep::norm;
    Normalizer key(NormalizationProfile::dedup_key());
    Normalizer pretrain(NormalizationProfile::pretrain());
    DetRng rng(20260810);
    for (int i = 0; i < 100000; ++i) {
        std::string s = testsupport::random_unicode_string(rng);
        std::string k = key.normalize(s);
        if (key.normalize(k) != k)
            throw Failure("dedup-key profile not idempotent on sample " + std::to_string(i));
        std::string p = pretrain.normalize(s);
        if (pretrain.normalize(p) != p)
            throw Failure("pretrain profile not idempotent on sample " + std::to_string(i));
    }
}

// ---------------------------------------------------------------- C3
void c3_dedup(std::ostream& detail) {
    auto dir = testsupport::make_temp_dir("acc-dedup");
    auto plant = testsupport::write_dedup_corpus(dir / "corpus.txt", 1446, 1000000);
    detail << "planted unique=" << plant.unique_lines << " exact=" << plant.exact_dups
           << " diacritic=" << plant.diacritic_variants << " url=" << plant.url_variants << "; ";

    std::string first_hash;
    for (uint32_t partitions : {1u, 7u, 64u}) {
        dedup::DedupOptions opts;
        opts.partitions = partitions;
        std::ifstream in(dir / "corpus.txt");
        RecordReader reader(in, RecordFormat::kRaw);
        std::vector<std::string> unique_texts;
        dedup::DedupStats stats = dedup::dedup_stream(
            reader, opts, [&](const TextRecord& r) { unique_texts.push_back(r.text); });

        require(stats.input == plant.total_lines, "input count mismatch");
        require(stats.input == stats.unique + stats.duplicates,
                "conservation violated: input != unique + duplicates");
        require(stats.unique == plant.unique_lines,
                "unique count " + std::to_string(stats.unique) + " != planted " +
                    std::to_string(plant.unique_lines) + " at P=" +
                    std::to_string(partitions));

        std::sort(unique_texts.begin(), unique_texts.end());
        std::string blob;
        for (const auto& t : unique_texts) {
            blob += t;
            blob.push_back('\n');
        }
        std::string hash = murmur3_128(blob, 0).hex();
        if (first_hash.empty()) first_hash = hash;
        require(hash == first_hash,
                "unique set differs at P=" + std::to_string(partitions));
    }
    fs::remove_all(dir);
}

// ---------------------------------------------------------------- C4
void c4_segmenter() {
    using namespace arprep::seg;
    SegmentedWord w = segment_word("وكتابنا", AffixTable::builtin());
    require_eq_str(render_segments(w, MarkerStyle::kPlusMarks), "و+ كتاب +نا",
                   "worked example");

    const AffixTable& table = AffixTable::builtin();
    Segmenter segmenter(table);
    DetRng rng(44);
    for (int i = 0; i < 10000; ++i) {
        std::string word;
        uint64_t n_pre = rng.below(3);
        for (uint64_t k = 0; k < n_pre; ++k)
            word += table.prefixes[rng.below(table.prefixes.size())];
        word += testsupport::random_arabic_word(rng, 2, 6);
        uint64_t n_suf = rng.below(3);
        for (uint64_t k = 0; k < n_suf; ++k)
            word += table.suffixes[rng.below(table.suffixes.size())];

        SegmentedWord seg = segmenter.word(word);
        if (seg.join() != word)
            throw Failure("join(segment('" + word + "')) != word (sample " +
                          std::to_string(i) + ")");
    }
}

// ---------------------------------------------------------------- C5
void c5_bpe(std::ostream& detail) {
    DetRng rng(55);
    size_t total_merges = 0;
    for (int round = 0; round < 20; ++round) {
        // <= 10^4 tokens per corpus
        std::vector<std::string> corpus;
        size_t tokens = 0;
        while (tokens < 9000) {
            std::string line;
            int words = 1 + static_cast<int>(rng.below(9));
            for (int w = 0; w < words; ++w) {
                if (w) line.push_back(' ');
                line += testsupport::random_arabic_word(rng, 2, 6);
                ++tokens;
            }
            corpus.push_back(std::move(line));
        }
        bpe::BpeTrainConfig cfg;
        cfg.target_vocab = 120 + 30 * round;
        bpe::BpeModel model = bpe::BpeModel::train(corpus, cfg);
        auto expected = refbpe::learn(corpus, cfg.target_vocab, cfg.min_frequency);
        if (model.merges() != expected)
            throw Failure("merge sequence differs from the reference on corpus " +
                          std::to_string(round));
        total_merges += expected.size();
    }
    detail << total_merges << " merges cross-checked; ";

    // round-trip identity over 10^5 lines
    std::vector<std::string> corpus;
    for (int i = 0; i < 4000; ++i) {
        std::string line;
        int words = 2 + static_cast<int>(rng.below(9));
        for (int w = 0; w < words; ++w) {
            if (w) line.push_back(' ');
            line += testsupport::random_arabic_word(rng, 2, 6);
        }
        corpus.push_back(std::move(line));
    }
    bpe::BpeTrainConfig cfg;
    cfg.target_vocab = 800;
    bpe::BpeModel model = bpe::BpeModel::train(corpus, cfg);
    for (int i = 0; i < 100000; ++i) {
        const std::string& line = corpus[rng.below(corpus.size())];
        if (model.decode(model.encode(line)) != line)
            throw Failure("encode/decode round-trip failed on: " + line);
    }
}

// ---------------------------------------------------------------- C6
void c6_mlm(std::ostream& detail) {
    DetRng seq_rng(66);
    constexpr int32_t kVocab = 5000;
    std::vector<bpe::TokenSequence> seqs;
    uint64_t maskable = 0;
    while (maskable < 1200000) {
        bpe::TokenSequence seq;
        int len = 80 + static_cast<int>(seq_rng.below(40));
        for (int k = 0; k < len; ++k)
            seq.ids.push_back(bpe::kNumSpecials +
                              static_cast<int32_t>(seq_rng.below(kVocab - bpe::kNumSpecials)));
        seq.is_continuation.assign(seq.ids.size(), false);
        maskable += std::min<size_t>(seq.ids.size(), 126);
        seqs.push_back(std::move(seq));
    }

    mlm::MlmParams params;
    params.max_seq_len = 128;
    params.mask_prob = 0.15;
    params.dup_factor = 1;
    params.seed = 606;
    auto instances = mlm::make_instances(seqs, params, kVocab);

    uint64_t selected = 0, masked = 0, random_repl = 0, unchanged = 0;
    for (const auto& inst : instances) {
        selected += inst.mask_positions.size();
        for (size_t k = 0; k < inst.mask_positions.size(); ++k) {
            int32_t now = inst.input_ids[static_cast<size_t>(inst.mask_positions[k])];
            if (now == bpe::kMask) ++masked;
            else if (now == inst.mask_labels[k]) ++unchanged;
            else ++random_repl;
        }
    }
    double rate = static_cast<double>(selected) / static_cast<double>(maskable);
    detail << "maskable=" << maskable << " rate=" << rate << "; ";
    require(std::abs(rate - 0.15) <= 0.005,
            "selection rate " + std::to_string(rate) + " outside 15% +/- 0.5pp");
    double m = static_cast<double>(masked) / static_cast<double>(selected);
    double r = static_cast<double>(random_repl) / static_cast<double>(selected);
    double u = static_cast<double>(unchanged) / static_cast<double>(selected);
    require(std::abs(m - 0.80) <= 0.01, "MASK share " + std::to_string(m) + " off 80% by >1pp");
    require(std::abs(r - 0.10) <= 0.01,
            "random share " + std::to_string(r) + " off 10% by >1pp");
    require(std::abs(u - 0.10) <= 0.01,
            "unchanged share " + std::to_string(u) + " off 10% by >1pp");

    // byte-identical shards across two seeded runs
    auto dir1 = testsupport::make_temp_dir("acc-shards1");
    auto dir2 = testsupport::make_temp_dir("acc-shards2");
    std::vector<bpe::TokenSequence> small(seqs.begin(), seqs.begin() + 500);
    mlm::write_shards(mlm::make_instances(small, params, kVocab), 128, dir1,
                      mlm::ShardFormat::kBinary, params);
    mlm::write_shards(mlm::make_instances(small, params, kVocab), 128, dir2,
                      mlm::ShardFormat::kBinary, params);
    require(testsupport::dir_hash(dir1) == testsupport::dir_hash(dir2),
            "two seeded runs produced different shard bytes");
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

// ---------------------------------------------------------------- C7
void c7_metrics() {
    using namespace arprep::eval;
    auto preds = [](std::vector<std::pair<std::string, std::string>> p) {
        return LabeledPredictions{"t", std::move(p)};
    };
    auto close = [](double got, double want) { return std::abs(got - want) <= 1e-9; };

    struct Case {
        double got;
        double want;
        const char* name;
    };
    const Case cases[] = {
        {f1_minority(preds({{"A", "A"}, {"A", "A"}, {"B", "B"}})), 1.0, "minority perfect"},
        {f1_minority(preds({{"A", "A"}, {"A", "A"}, {"A", "B"}, {"B", "B"}})), 2.0 / 3.0,
         "minority 2/3"},
        {f1_minority(preds({{"A", "A"}, {"A", "A"}, {"A", "A"}, {"B", "A"}})), 0.0,
         "minority zero recall"},
        {f1_minority(preds({{"A", "A"}, {"A", "B"}, {"B", "B"}, {"B", "B"}})), 2.0 / 3.0,
         "minority tie to lexicographic"},
        {f1_minority(preds({{"B", "B"}, {"B", "B"}, {"B", "A"}, {"A", "A"}})), 2.0 / 3.0,
         "minority by support"},
        {f1_macro(preds({{"X", "X"}, {"Y", "Y"}, {"Z", "Z"}})), 1.0, "macro perfect"},
        {f1_macro(preds({{"A", "A"}, {"A", "A"}, {"A", "B"}, {"B", "B"}})), 11.0 / 15.0,
         "macro two-class"},
        {f1_macro(preds({{"A", "A"}, {"B", "A"}, {"C", "A"}, {"A", "A"}})), 2.0 / 9.0,
         "macro absent classes"},
        {f1_macro(preds({{"A", "A"}, {"A", "A"}})), 1.0, "macro degenerate"},
        {f1_macro(preds({{"A", "A"}, {"B", "B"}, {"C", "B"}, {"A", "A"}, {"B", "C"},
                         {"C", "C"}})), 2.0 / 3.0, "macro mixed"},
        {f1_macro(preds({{"A", "A"}, {"A", "C"}, {"B", "B"}, {"B", "C"}})), 2.0 / 3.0,
         "macro pred-only class"},
        {f1_macro(preds({{"A", "B"}, {"A", "B"}, {"B", "A"}})), 0.0, "macro all wrong"},
    };
    for (const auto& c : cases)
        require(close(c.got, c.want), std::string(c.name) + ": got " + std::to_string(c.got));

    std::vector<IobSentence> sents = {
        {{"B-PER", "I-PER", "O", "B-LOC"}, {"B-PER", "I-PER", "O", "B-LOC"}},
        {{"B-PER", "I-PER", "O", "O"}, {"B-PER", "O", "O", "O"}},
        {{"B-ORG", "I-ORG", "O"}, {"B-LOC", "I-LOC", "O"}},
        {{"O", "I-PER", "I-PER"}, {"O", "B-PER", "I-PER"}},
        {{"B-LOC", "O", "B-PER", "I-PER", "O", "B-ORG"},
         {"B-LOC", "O", "B-PER", "I-PER", "I-PER", "B-ORG"}},
    };
    require(close(span_f1(sents), 0.625), "span IOB fixture != 5/8");
}

// ---------------------------------------------------------------- C8
void c8_selection(std::ostream& detail) {
    using namespace arprep::eval;
    auto one_row = [](const std::string& name, std::vector<double> scores) {
        ModelScores m;
        m.model = name;
        m.matrix.tasks = {"AJGT", "Emotion", "NER", "Offensive", "QADI"};
        m.matrix.checkpoints = {100000};
        std::vector<std::optional<double>> row;
        for (double s : scores) row.push_back(s / 100.0);
        m.matrix.scores = {row};
        return m;
    };
    std::vector<ModelScores> models = {
        one_row("QARiB10", {92.2, 43.6, 61.3, 88.5, 60.1}),
        one_row("QARiB25", {93.3, 44.7, 63.8, 90.0, 60.7}),
        one_row("QARiB25_mix", {93.3, 46.8, 64.4, 89.5, 60.9}),
        one_row("QARiB25_mix_far", {93.3, 45.2, 69.1, 89.0, 61.3}),
        one_row("QARiB60_mix", {93.3, 46.1, 63.0, 90.0, 61.4}),
        one_row("AraBERTv0.1", {90.8, 43.9, 65.0, 88.1, 59.9}),
        one_row("AraBERTv1", {93.6, 42.4, 66.6, 89.0, 59.9}),
        one_row("ArabicBERT", {83.3, 41.7, 64.0, 88.2, 61.7}),
        one_row("mBERT", {86.6, 27.9, 49.4, 83.1, 57.8}),
    };
    ComparisonTable table = tabulate(models);
    require(table.tasks.size() == 5 && table.rows.size() == 9, "table layout");

    auto cell = [&](const std::string& model, size_t task) {
        for (size_t i = 0; i < table.rows.size(); ++i)
            if (table.rows[i].model == model)
                return std::make_pair(*table.rows[i].scores[task],
                                      static_cast<bool>(table.best[i][task]));
        throw Failure("missing model row " + model);
    };
    auto [ner, ner_best] = cell("QARiB25_mix_far", 2);
    require(ner_best && std::abs(ner - 0.691) < 1e-9,
            "NER best must be QARiB25_mix_far at 69.1");
    double best_qadi = 0.0;
    std::string best_name;
    for (const char* name : {"QARiB10", "QARiB25", "QARiB25_mix", "QARiB25_mix_far",
                             "QARiB60_mix"}) {
        auto [v, marked] = cell(name, 4);
        (void)marked;
        if (v > best_qadi) {
            best_qadi = v;
            best_name = name;
        }
    }
    require(best_name == "QARiB60_mix" && std::abs(best_qadi - 0.614) < 1e-9,
            "QADI best among the QARiB rows must be QARiB60_mix at 61.4");

    // argmax invariances on 10^3 random matrices
    DetRng rng(88);
    int checked = 0;
    for (int round = 0; round < 1000; ++round) {
        ScoreMatrix m;
        size_t rows = 3 + rng.below(6);
        size_t cols = 2 + rng.below(4);
        for (size_t j = 0; j < cols; ++j) m.tasks.push_back("T" + std::to_string(j));
        for (size_t i = 0; i < rows; ++i) {
            m.checkpoints.push_back(static_cast<int64_t>((i + 1) * 500));
            std::vector<std::optional<double>> row;
            for (size_t j = 0; j < cols; ++j) {
                if (i != 0 && rng.below(12) == 0) row.push_back(std::nullopt);
                else row.push_back(0.3 + 0.4 * rng.uniform01());
            }
            m.scores.push_back(std::move(row));
        }

        int64_t mean_pick = select_checkpoint(m, SelectionPolicy::kMean).selected;
        ScoreMatrix shifted = m;
        for (size_t j = 0; j < cols; ++j) {
            double shift = -0.25 + 0.5 * rng.uniform01();
            for (auto& row : shifted.scores)
                if (row[j]) row[j] = *row[j] + shift;
        }
        require(select_checkpoint(shifted, SelectionPolicy::kMean).selected == mean_pick,
                "mean argmax moved under an additive task shift (round " +
                    std::to_string(round) + ")");

        int64_t rank_pick = select_checkpoint(m, SelectionPolicy::kMeanRank).selected;
        ScoreMatrix scaled = m;
        for (size_t j = 0; j < cols; ++j) {
            double k = 0.5 + 2.5 * rng.uniform01();
            bool flip = rng.below(2) == 1;
            for (auto& row : scaled.scores) {
                if (!row[j]) continue;
                double x = *row[j];
                row[j] = flip ? 1.0 - std::pow(1.0 - x, k) : std::pow(x, k);
            }
        }
        require(select_checkpoint(scaled, SelectionPolicy::kMeanRank).selected == rank_pick,
                "mean_rank argmax moved under a monotone rescale (round " +
                    std::to_string(round) + ")");
        ++checked;
    }
    detail << checked << " random matrices; ";
}

// ---------------------------------------------------------------- C9
void c9_end_to_end(std::ostream& detail) {
    auto dir = testsupport::make_temp_dir("acc-e2e");
    auto corpus = testsupport::write_mini_corpus(dir / "corpus", 2026, 5 * 1024 * 1024);
    detail << "corpus " << corpus.tweet_lines << "+" << corpus.formal_lines << " lines; ";

    std::string config = std::string("{\n") +
        "  \"inputs\": [\n" +
        "    {\"path\": \"" + (dir / "corpus" / "tweets.txt").string() +
        "\", \"format\": \"raw\", \"genre\": \"tweet\", \"source\": \"tweets\"},\n" +
        "    {\"path\": \"" + (dir / "corpus" / "formal.txt").string() +
        "\", \"format\": \"raw\", \"genre\": \"formal\", \"source\": \"news\"}\n" +
        "  ],\n" +
        "  \"seed\": 7,\n" +
        "  \"workers\": 2,\n" +
        "  \"mix\": {\"enabled\": true, \"proportions\": {\"tweet\": 0.5, \"formal\": 0.5}},\n" +
        "  \"dedup\": {\"partitions\": 4},\n" +
        "  \"bpe\": {\"target_vocab\": 2000},\n" +
        "  \"mlm\": {\"max_seq_len\": 64, \"dup_factor\": 2, \"shard_size\": 20000}\n" +
        "}\n";
    testsupport::write_file(dir / "config.json", config);

    auto run_cli = [&](const std::string& out_dir) {
        std::string cmd = std::string(ARPREP_CLI_PATH) + " run --config " +
                          (dir / "config.json").string() + " --out-dir " + out_dir + " >> " +
                          (dir / "cli.log").string() + " 2>&1";
        int rc = std::system(cmd.c_str());
        require(rc == 0, "CLI run exited with " + std::to_string(rc));
    };
    run_cli((dir / "run1").string());
    run_cli((dir / "run2").string());

    std::string h1 = testsupport::dir_hash(dir / "run1" / "data");
    std::string h2 = testsupport::dir_hash(dir / "run2" / "data");
    require(h1 == h2, "two seeded runs differ: " + h1 + " vs " + h2);
    detail << "dir hash " << h1.substr(0, 12) << "; ";

    require(fs::exists(dir / "run1" / "data" / "06-shards" / "manifest.json"),
            "mlm shards missing");

    // token inflation: clitic segmentation strictly adds whitespace tokens
    using pipeline::TokenizerKind;
    pipeline::CorpusStats ws = pipeline::compute_stats_file(
        dir / "run1" / "data" / "02-normalize.jsonl", RecordFormat::kJsonl,
        TokenizerKind::kWhitespace);
    pipeline::CorpusStats post = pipeline::compute_stats_file(
        dir / "run1" / "data" / "02-normalize.jsonl", RecordFormat::kJsonl,
        TokenizerKind::kPostSegmentation);
    detail << "tokens " << ws.total.tokens << " -> " << post.total.tokens << "; ";
    require(post.total.tokens > ws.total.tokens,
            "post-segmentation token count did not exceed the whitespace count");

    fs::remove_all(dir);
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: no stated budget
    std::function<void(std::ostream&)> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "normalization golden suite", 1.0, [](std::ostream&) { c1_normalization_golden(); }},
        {2, "profile idempotence over 1e5 random strings", 0.0,
         [](std::ostream&) { c2_idempotence(); }},
        {3, "dedup of 1e6 planted lines, partition-invariant", 60.0, c3_dedup},
        {4, "clitic segmentation worked example + lossless join", 0.0,
         [](std::ostream&) { c4_segmenter(); }},
        {5, "bpe reference equivalence + round-trip", 120.0, c5_bpe},
        {6, "mlm masking statistics and shard determinism", 0.0, c6_mlm},
        {7, "metric fixtures to 1e-9", 0.0, [](std::ostream&) { c7_metrics(); }},
        {8, "comparison table + selection invariances", 0.0, c8_selection},
        {9, "end-to-end determinism and token inflation", 300.0, c9_end_to_end},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream detail;
        auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.fn(detail);
        } catch (const std::exception& e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
        if (error.empty() && c.budget_s > 0.0 && secs > c.budget_s)
            error = "runtime " + std::to_string(secs) + "s exceeds budget " +
                    std::to_string(c.budget_s) + "s";
        char line[160];
        std::snprintf(line, sizeof(line), "C%d %s  %s  (%.2fs)", c.id,
                      error.empty() ? "PASS" : "FAIL", c.name, secs);
        std::cout << line;
        if (!detail.str().empty()) std::cout << "  [" << detail.str() << "]";
        if (!error.empty()) {
            std::cout << "\n    " << error;
            ++failures;
        }
        std::cout << std::endl;
    }
    if (failures) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all acceptance criteria passed" << std::endl;
    return 0;
}
