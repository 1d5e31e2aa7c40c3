// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_DEDUP_HPP
#define ARPREP_DEDUP_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

#include "arprep/hash128.hpp"
#include "arprep/record.hpp"
#include "arprep/text_norm.hpp"

namespace arprep::dedup {

inline constexpr uint64_t kDefaultHashSeed = 0xA7B75EEDULL;

enum class HashWidth { k64, k128 };

// Key of the DedupKey-normalized text. Equal normalized strings get equal
// keys; the shard is the partition a record spills to.
struct DedupKey {
    Hash128 key;
    uint32_t shard = 0;
};

struct DedupOptions {
    uint32_t partitions = 1;
    std::filesystem::path spill_dir;  // empty: run fully in memory
    uint64_t hash_seed = kDefaultHashSeed;
    HashWidth width = HashWidth::k128;
    bool paranoid = false;    // keep normalized strings per partition, verify equality on key hits
    bool all_genres = false;  // default: only tweet-genre records are deduplicated
};

struct DedupStats {
    uint64_t input = 0;
    uint64_t unique = 0;
    uint64_t duplicates = 0;  // input == unique + duplicates

    void merge(const DedupStats& o) {
        input += o.input;
        unique += o.unique;
        duplicates += o.duplicates;
    }
};

// Normalizes with the DedupKey profile and hashes the result. Stable across
// runs for a fixed seed.
class KeyMaker {
public:
    explicit KeyMaker(uint64_t seed = kDefaultHashSeed, HashWidth width = HashWidth::k128,
                      uint32_t partitions = 1);

    DedupKey key_of(const TextRecord& record) const;
    std::string normalized_of(const TextRecord& record) const;
    DedupKey key_of_normalized(std::string_view normalized) const;

private:
    norm::Normalizer normalizer_;
    uint64_t seed_;
    HashWidth width_;
    uint32_t partitions_;
};

inline DedupKey key_of(const TextRecord& record, uint64_t seed = kDefaultHashSeed,
                       HashWidth width = HashWidth::k128, uint32_t partitions = 1) {
    return KeyMaker(seed, width, partitions).key_of(record);
}

using EmitFn = std::function<void(const TextRecord&)>;

// Emits the first record per distinct key, preserving first-occurrence order
// within each partition. With a spill_dir the input is hash-partitioned to
// disk first and only one partition's key set is held in memory at a time.
DedupStats dedup_stream(RecordReader& in, const DedupOptions& opts, const EmitFn& emit);

// Convenience for in-memory inputs.
std::pair<std::vector<TextRecord>, DedupStats> dedup_records(const std::vector<TextRecord>& in,
                                                             const DedupOptions& opts);

}  // namespace arprep::dedup

#endif  // ARPREP_DEDUP_HPP
