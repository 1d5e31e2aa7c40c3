// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <sstream>

#include "arprep/dedup.hpp"
#include "arprep/rng.hpp"
#include "support/corpus_gen.hpp"

namespace {

using namespace arprep;

void BM_KeyOf(benchmark::State& state) {
    DetRng rng(2);
    std::vector<TextRecord> records;
    for (int i = 0; i < 2000; ++i)
        records.push_back({std::to_string(i), testsupport::random_tweet_line(rng),
                           Genre::kTweet, "bench"});
    dedup::KeyMaker keys;
    size_t items = 0;
    for (auto _ : state) {
        for (const auto& rec : records) {
            benchmark::DoNotOptimize(keys.key_of(rec));
            ++items;
        }
    }
    state.SetItemsProcessed(static_cast<int64_t>(items));
}
BENCHMARK(BM_KeyOf)->Unit(benchmark::kMillisecond);

void BM_DedupStreamInMemory(benchmark::State& state) {
    DetRng rng(3);
    std::string corpus;
    for (int i = 0; i < 50000; ++i) corpus += testsupport::random_tweet_line(rng) + "\n";
    size_t items = 0;
    for (auto _ : state) {
        std::istringstream in(corpus);
        RecordReader reader(in, RecordFormat::kRaw);
        dedup::DedupStats stats =
            dedup::dedup_stream(reader, {}, [](const TextRecord&) {});
        benchmark::DoNotOptimize(stats);
        items += stats.input;
    }
    state.SetItemsProcessed(static_cast<int64_t>(items));
}
BENCHMARK(BM_DedupStreamInMemory)->Unit(benchmark::kMillisecond);

}  // namespace
