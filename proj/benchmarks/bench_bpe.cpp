// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "arprep/bpe.hpp"
#include "arprep/mlm.hpp"
#include "arprep/rng.hpp"
#include "support/corpus_gen.hpp"

namespace {

using namespace arprep;

std::vector<std::string> corpus_lines(size_t n, uint64_t seed) {
    DetRng rng(seed);
    std::vector<std::string> lines;
    lines.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::string line;
        int words = 4 + static_cast<int>(rng.below(8));
        for (int w = 0; w < words; ++w) {
            if (w) line.push_back(' ');
            line += testsupport::random_arabic_word(rng, 2, 6);
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

void BM_BpeTrain(benchmark::State& state) {
    auto lines = corpus_lines(static_cast<size_t>(state.range(0)), 4);
    bpe::BpeTrainConfig cfg;
    cfg.target_vocab = 1000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bpe::BpeModel::train(lines, cfg));
    }
}
BENCHMARK(BM_BpeTrain)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BpeEncode(benchmark::State& state) {
    auto lines = corpus_lines(5000, 5);
    bpe::BpeTrainConfig cfg;
    cfg.target_vocab = 1000;
    bpe::BpeModel model = bpe::BpeModel::train(lines, cfg);
    size_t items = 0;
    for (auto _ : state) {
        for (const auto& line : lines) {
            benchmark::DoNotOptimize(model.encode(line));
            ++items;
        }
    }
    state.SetItemsProcessed(static_cast<int64_t>(items));
}
BENCHMARK(BM_BpeEncode)->Unit(benchmark::kMillisecond);

void BM_MlmGenerate(benchmark::State& state) {
    DetRng rng(6);
    std::vector<bpe::TokenSequence> seqs;
    for (int i = 0; i < 2000; ++i) {
        bpe::TokenSequence seq;
        int len = 30 + static_cast<int>(rng.below(90));
        for (int k = 0; k < len; ++k)
            seq.ids.push_back(bpe::kNumSpecials + static_cast<int32_t>(rng.below(5000)));
        seq.is_continuation.assign(seq.ids.size(), false);
        seqs.push_back(std::move(seq));
    }
    mlm::MlmParams params;
    params.dup_factor = 1;
    size_t items = 0;
    for (auto _ : state) {
        auto instances = mlm::make_instances(seqs, params, 5008);
        benchmark::DoNotOptimize(instances);
        items += instances.size();
    }
    state.SetItemsProcessed(static_cast<int64_t>(items));
}
BENCHMARK(BM_MlmGenerate)->Unit(benchmark::kMillisecond);

}  // namespace
