// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_PIPELINE_HPP
#define ARPREP_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "arprep/bpe.hpp"
#include "arprep/dedup.hpp"
#include "arprep/mlm.hpp"
#include "arprep/record.hpp"
#include "arprep/segment.hpp"

namespace arprep::pipeline {

// --- corpus statistics ---

enum class TokenizerKind { kWhitespace, kPostSegmentation };

struct GenreStats {
    uint64_t bytes = 0;
    uint64_t lines = 0;
    uint64_t tokens = 0;

    void merge(const GenreStats& o) {
        bytes += o.bytes;
        lines += o.lines;
        tokens += o.tokens;
    }
};

// Size / lines / tokens, total and per genre. Bytes count the text plus one
// newline per record, so raw newline-terminated files match their file size.
struct CorpusStats {
    GenreStats total;
    std::map<std::string, GenreStats> per_genre;

    void merge(const CorpusStats& o);
    std::string to_json() const;
};

// Streaming, constant memory. kPostSegmentation counts tokens after running
// the builtin clitic segmenter over each record (segmentation only splits,
// so the count can only grow).
CorpusStats compute_stats(std::istream& in, RecordFormat format, TokenizerKind tokenizer,
                          Genre default_genre = Genre::kTweet);
CorpusStats compute_stats_file(const std::filesystem::path& path, RecordFormat format,
                               TokenizerKind tokenizer, Genre default_genre = Genre::kTweet);

// --- genre mixing ---

struct InputSpec {
    std::string path;
    RecordFormat format = RecordFormat::kRaw;
    Genre genre = Genre::kTweet;
    std::string source = "input";
};

struct MixSpec {
    bool enabled = false;
    std::map<std::string, double> proportions;  // genre name -> share, sums to 1
    uint64_t total_lines = 0;                   // 0: largest total the inputs support
};

// Deterministic random sample per genre (selection sampling over two file
// passes), interleaved by proportion. A genre that cannot fill its share is
// an error naming the shortfall. Returns lines written.
uint64_t sample_mix(const std::vector<InputSpec>& inputs, const MixSpec& mix, uint64_t seed,
                    RecordWriter& out);

// --- full pipeline ---

struct PipelineConfig {
    std::vector<InputSpec> inputs;
    std::filesystem::path out_dir;
    uint64_t seed = 1;
    unsigned workers = 1;

    MixSpec mix;
    bool do_normalize = true;
    bool do_dedup = true;
    bool do_segment = true;
    bool do_bpe = true;
    bool do_mlm = true;

    // normalize
    std::string farsi_map;  // empty: builtin mapping table

    // dedup
    uint32_t dedup_partitions = 1;
    bool dedup_spill = false;  // spill under <out_dir>/meta/spill
    uint64_t dedup_hash_seed = dedup::kDefaultHashSeed;
    dedup::HashWidth dedup_width = dedup::HashWidth::k128;
    bool dedup_paranoid = false;
    bool dedup_all_genres = false;

    // segment
    std::string segmenter = "builtin";  // none | builtin | external:<cmd>
    seg::MarkerStyle render = seg::MarkerStyle::kPlusMarks;
    std::string affix_table;  // empty: builtin table
    int segment_timeout_ms = 30000;

    // bpe
    bpe::BpeTrainConfig bpe_train;
    std::string bpe_model_dir;  // reuse an existing model instead of training

    // mlm
    mlm::MlmParams mlm_params;
    uint64_t shard_size = 100000;
    mlm::ShardFormat shard_format = mlm::ShardFormat::kBinary;

    static PipelineConfig from_json_file(const std::filesystem::path& file);
    void validate() const;
    std::string config_hash() const;  // over everything that shapes the artifacts
};

struct StageReport {
    std::string stage;
    uint64_t records_in = 0;
    uint64_t records_out = 0;
    double wall_ms = 0.0;
    bool skipped = false;  // resumed from an existing completion marker
};

struct RunReport {
    std::vector<StageReport> stages;
    CorpusStats final_stats;
    std::string final_text_artifact;

    std::string to_json() const;
    std::string to_text() const;
};

// Stages run in fixed order (ingest, mix, normalize, dedup, segment,
// bpe-train, bpe-encode, mlm, stats). Artifacts land under <out_dir>/data,
// completion markers and the report under <out_dir>/meta; a rerun skips
// stages whose marker matches the config. Identical config and seed produce
// byte-identical data/ trees.
RunReport run_pipeline(const PipelineConfig& config);

}  // namespace arprep::pipeline

#endif  // ARPREP_PIPELINE_HPP
