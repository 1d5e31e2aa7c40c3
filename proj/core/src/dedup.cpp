// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "arprep/dedup.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace arprep::dedup {

namespace fs = std::filesystem;

KeyMaker::KeyMaker(uint64_t seed, HashWidth width, uint32_t partitions)
    : normalizer_(norm::NormalizationProfile::dedup_key()), seed_(seed), width_(width),
      partitions_(partitions == 0 ? 1 : partitions) {}

std::string KeyMaker::normalized_of(const TextRecord& record) const {
    return normalizer_.normalize(record.text);
}

DedupKey KeyMaker::key_of_normalized(std::string_view normalized) const {
    Hash128 h = murmur3_128(normalized, seed_);
    if (width_ == HashWidth::k64) h.hi = 0;
    return {h, static_cast<uint32_t>(h.mod(partitions_))};
}

DedupKey KeyMaker::key_of(const TextRecord& record) const {
    return key_of_normalized(normalized_of(record));
}

namespace {

// Tracks seen keys; in paranoid mode a key hit is confirmed against the full
// normalized strings, so a hash collision cannot drop a distinct record.
class SeenSet {
public:
    explicit SeenSet(bool paranoid) : paranoid_(paranoid) {}

    bool insert(const Hash128& key, std::string_view normalized) {
        if (!paranoid_) return keys_.insert(key).second;
        auto& bucket = strings_[key];
        for (const auto& s : bucket)
            if (s == normalized) return false;
        bucket.emplace_back(normalized);
        return true;
    }

private:
    bool paranoid_;
    std::unordered_set<Hash128, Hash128Hasher> keys_;
    std::unordered_map<Hash128, std::vector<std::string>, Hash128Hasher> strings_;
};

struct SpillEntry {
    Hash128 key;
    bool passthrough = false;
    std::string normalized;  // only in paranoid mode
    TextRecord record;
};

std::string spill_line(const SpillEntry& e) {
    nlohmann::json j{{"h", e.key.hi},
                     {"l", e.key.lo},
                     {"p", e.passthrough},
                     {"r",
                      {{"id", e.record.id},
                       {"text", e.record.text},
                       {"genre", std::string(genre_name(e.record.genre))},
                       {"source", e.record.source}}}};
    if (!e.normalized.empty()) j["n"] = e.normalized;
    return j.dump();
}

SpillEntry parse_spill_line(const std::string& line, uint32_t partition) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
        throw std::runtime_error("dedup: partition " + std::to_string(partition) +
                                 ": corrupt spill line");
    SpillEntry e;
    e.key = {j.at("h").get<uint64_t>(), j.at("l").get<uint64_t>()};
    e.passthrough = j.value("p", false);
    e.normalized = j.value("n", std::string());
    const auto& r = j.at("r");
    e.record.id = r.at("id").get<std::string>();
    e.record.text = r.at("text").get<std::string>();
    e.record.genre = genre_from_name(r.at("genre").get<std::string>()).value_or(Genre::kTweet);
    e.record.source = r.at("source").get<std::string>();
    return e;
}

DedupStats dedup_in_memory(RecordReader& in, const DedupOptions& opts, const EmitFn& emit) {
    KeyMaker keys(opts.hash_seed, opts.width, opts.partitions);
    SeenSet seen(opts.paranoid);
    DedupStats stats;
    TextRecord rec;
    while (in.next(rec)) {
        ++stats.input;
        if (!opts.all_genres && rec.genre != Genre::kTweet) {
            ++stats.unique;
            emit(rec);
            continue;
        }
        std::string normalized = keys.normalized_of(rec);
        DedupKey key = keys.key_of_normalized(normalized);
        if (seen.insert(key.key, normalized)) {
            ++stats.unique;
            emit(rec);
        } else {
            ++stats.duplicates;
        }
    }
    return stats;
}

DedupStats dedup_spilled(RecordReader& in, const DedupOptions& opts, const EmitFn& emit) {
    const uint32_t parts = opts.partitions == 0 ? 1 : opts.partitions;
    std::error_code ec;
    fs::create_directories(opts.spill_dir, ec);
    if (ec)
        throw std::runtime_error("dedup: cannot create spill dir " + opts.spill_dir.string() +
                                 ": " + ec.message());

    std::vector<fs::path> paths(parts);
    std::vector<std::ofstream> spills(parts);
    for (uint32_t p = 0; p < parts; ++p) {
        char name[32];
        std::snprintf(name, sizeof(name), "part-%05u.spill", p);
        paths[p] = opts.spill_dir / name;
        spills[p].open(paths[p], std::ios::trunc);
        if (!spills[p])
            throw std::runtime_error("dedup: partition " + std::to_string(p) +
                                     ": cannot open spill file " + paths[p].string());
    }

    KeyMaker keys(opts.hash_seed, opts.width, parts);
    DedupStats stats;
    TextRecord rec;
    while (in.next(rec)) {
        ++stats.input;
        SpillEntry e;
        e.record = rec;
        if (!opts.all_genres && rec.genre != Genre::kTweet) {
            e.passthrough = true;
            e.key = keys.key_of_normalized(rec.id).key;  // only used for routing
        } else {
            std::string normalized = keys.normalized_of(rec);
            e.key = keys.key_of_normalized(normalized).key;
            if (opts.paranoid) e.normalized = std::move(normalized);
        }
        uint32_t p = static_cast<uint32_t>(e.key.mod(parts));
        spills[p] << spill_line(e) << '\n';
        if (!spills[p])
            throw std::runtime_error("dedup: partition " + std::to_string(p) +
                                     ": spill write failed (" + paths[p].string() + ")");
    }
    for (auto& s : spills) s.close();

    // Each partition fits its key set in memory; records stream through.
    for (uint32_t p = 0; p < parts; ++p) {
        std::ifstream part(paths[p]);
        if (!part)
            throw std::runtime_error("dedup: partition " + std::to_string(p) +
                                     ": cannot reopen spill file " + paths[p].string());
        SeenSet seen(opts.paranoid);
        std::string line;
        while (std::getline(part, line)) {
            SpillEntry e = parse_spill_line(line, p);
            if (e.passthrough || seen.insert(e.key, e.normalized)) {
                ++stats.unique;
                emit(e.record);
            } else {
                ++stats.duplicates;
            }
        }
        part.close();
        fs::remove(paths[p], ec);
    }
    return stats;
}

}  // namespace

DedupStats dedup_stream(RecordReader& in, const DedupOptions& opts, const EmitFn& emit) {
    if (opts.partitions < 1) throw std::invalid_argument("dedup: partitions must be >= 1");
    if (opts.spill_dir.empty()) return dedup_in_memory(in, opts, emit);
    return dedup_spilled(in, opts, emit);
}

std::pair<std::vector<TextRecord>, DedupStats> dedup_records(const std::vector<TextRecord>& in,
                                                             const DedupOptions& opts) {
    std::stringstream buf;
    for (const auto& r : in) buf << serialize_record(r, RecordFormat::kJsonl) << '\n';
    RecordReader reader(buf, RecordFormat::kJsonl);
    std::vector<TextRecord> out;
    DedupStats stats = dedup_stream(reader, opts, [&](const TextRecord& r) { out.push_back(r); });
    return {std::move(out), stats};
}

}  // namespace arprep::dedup
