// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "arprep/rng.hpp"
#include "arprep/segment.hpp"
#include "arprep/text_norm.hpp"
#include "support/corpus_gen.hpp"

namespace {

using namespace arprep;

std::vector<std::string> tweet_lines(size_t n) {
    DetRng rng(1);
    std::vector<std::string> lines;
    lines.reserve(n);
    for (size_t i = 0; i < n; ++i) lines.push_back(testsupport::random_tweet_line(rng));
    return lines;
}

void BM_NormalizePretrain(benchmark::State& state) {
    auto lines = tweet_lines(2000);
    norm::Normalizer normalizer(norm::NormalizationProfile::pretrain());
    size_t bytes = 0;
    for (auto _ : state) {
        for (const auto& line : lines) {
            benchmark::DoNotOptimize(normalizer.normalize(line));
            bytes += line.size();
        }
    }
    state.SetBytesProcessed(static_cast<int64_t>(bytes));
}
BENCHMARK(BM_NormalizePretrain)->Unit(benchmark::kMillisecond);

void BM_NormalizeDedupKey(benchmark::State& state) {
    auto lines = tweet_lines(2000);
    norm::Normalizer normalizer(norm::NormalizationProfile::dedup_key());
    size_t bytes = 0;
    for (auto _ : state) {
        for (const auto& line : lines) {
            benchmark::DoNotOptimize(normalizer.normalize(line));
            bytes += line.size();
        }
    }
    state.SetBytesProcessed(static_cast<int64_t>(bytes));
}
BENCHMARK(BM_NormalizeDedupKey)->Unit(benchmark::kMillisecond);

void BM_SegmentLine(benchmark::State& state) {
    auto lines = tweet_lines(2000);
    seg::Segmenter segmenter;
    size_t items = 0;
    for (auto _ : state) {
        for (const auto& line : lines) {
            benchmark::DoNotOptimize(segmenter.line(line, seg::MarkerStyle::kPlusMarks));
            ++items;
        }
    }
    state.SetItemsProcessed(static_cast<int64_t>(items));
}
BENCHMARK(BM_SegmentLine)->Unit(benchmark::kMillisecond);

}  // namespace
