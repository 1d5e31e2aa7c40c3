// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_MLM_HPP
#define ARPREP_MLM_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "arprep/bpe.hpp"
#include "arprep/rng.hpp"

namespace arprep::mlm {

// Masked-LM instance generation. The only pretraining objective is masked
// token prediction; there is no next-sentence pairing, each input sequence
// stands alone.
struct MlmParams {
    int32_t max_seq_len = 128;
    double mask_prob = 0.15;
    int32_t dup_factor = 10;
    uint64_t seed = 1;
    bool whole_word = false;  // mask all subwords of a word together
};

struct MlmInstance {
    std::vector<int32_t> input_ids;  // [CLS] ... [SEP] [PAD]*, exactly max_seq_len long
    std::vector<int32_t> mask_positions;  // strictly increasing, never CLS/SEP/PAD
    std::vector<int32_t> mask_labels;     // pre-corruption ids, parallel to positions
    int32_t attention_length = 0;         // count of non-PAD positions
};

// Emits dup_factor instances per input sequence, each with independent
// masks. Selected positions get [MASK] 80% of the time, a random
// non-special id 10%, and stay unchanged 10%; the label always records the
// original id. Special tokens are never selected.
class InstanceGenerator {
public:
    InstanceGenerator(const MlmParams& params, int32_t vocab_size);

    void generate(const bpe::TokenSequence& seq, std::vector<MlmInstance>& out);

    const MlmParams& params() const { return params_; }

private:
    MlmParams params_;
    int32_t vocab_size_;
    DetRng rng_;
};

std::vector<MlmInstance> make_instances(const std::vector<bpe::TokenSequence>& seqs,
                                        const MlmParams& params, int32_t vocab_size);

enum class ShardFormat { kBinary, kDebugText };

std::string_view shard_format_name(ShardFormat f);

struct ShardInfo {
    std::string path;  // relative to the manifest directory
    uint64_t instances = 0;
};

struct ShardManifest {
    int32_t format_version = 1;
    ShardFormat record_format = ShardFormat::kBinary;
    MlmParams params;
    uint64_t shard_size = 0;
    std::vector<ShardInfo> shards;
    uint64_t total_instances = 0;
    uint64_t total_tokens = 0;        // non-PAD positions across all instances
    std::string params_hash;          // covers params + shard_size + format
    std::vector<std::string> assumed_defaults;  // params left at their defaults
};

// Rotates shard files every shard_size instances and writes manifest.json
// last, via an atomic rename: a readable manifest implies complete shards.
class ShardWriter {
public:
    ShardWriter(std::filesystem::path out_dir, uint64_t shard_size, ShardFormat format,
                const MlmParams& params,
                std::vector<std::string> assumed_defaults = {});
    ~ShardWriter();

    void add(const MlmInstance& instance);
    ShardManifest finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ShardManifest write_shards(const std::vector<MlmInstance>& instances, uint64_t shard_size,
                           const std::filesystem::path& out_dir,
                           ShardFormat format = ShardFormat::kBinary,
                           const MlmParams& params = {});

ShardManifest read_manifest(const std::filesystem::path& dir);
std::vector<MlmInstance> read_shards(const std::filesystem::path& dir);

}  // namespace arprep::mlm

#endif  // ARPREP_MLM_HPP
