// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "arprep/hash128.hpp"
#include "arprep/pipeline.hpp"
#include "arprep/rng.hpp"

namespace arprep::pipeline {

namespace {

struct GenrePlan {
    Genre genre = Genre::kTweet;
    double proportion = 0.0;
    uint64_t available = 0;
    uint64_t wanted = 0;
};

uint64_t count_genre_records(const std::vector<InputSpec>& inputs, Genre genre) {
    uint64_t n = 0;
    for (const auto& spec : inputs) {
        std::ifstream in(spec.path, std::ios::binary);
        if (!in) throw std::runtime_error("mix: cannot open " + spec.path);
        RecordReader reader(in, spec.format, spec.genre, spec.source);
        TextRecord rec;
        while (reader.next(rec))
            if (rec.genre == genre) ++n;
    }
    return n;
}

}  // namespace

uint64_t sample_mix(const std::vector<InputSpec>& inputs, const MixSpec& mix, uint64_t seed,
                    RecordWriter& out) {
    if (inputs.empty()) throw std::invalid_argument("mix: no inputs");

    std::vector<GenrePlan> plans;
    double sum = 0.0;
    for (const auto& [name, share] : mix.proportions) {
        auto genre = genre_from_name(name);
        if (!genre) throw std::invalid_argument("mix: unknown genre '" + name + "'");
        if (share < 0.0) throw std::invalid_argument("mix: negative proportion for " + name);
        sum += share;
        if (share > 0.0) plans.push_back({*genre, share, 0, 0});
    }
    if (plans.empty() || std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("mix: proportions must sum to 1");

    // Pass 1: availability per genre.
    for (auto& plan : plans) plan.available = count_genre_records(inputs, plan.genre);

    uint64_t total = mix.total_lines;
    if (total == 0) {
        // Largest total every genre can serve.
        double t = -1.0;
        for (const auto& plan : plans) {
            double cap = static_cast<double>(plan.available) / plan.proportion;
            if (t < 0.0 || cap < t) t = cap;
        }
        total = static_cast<uint64_t>(t);
    }

    // Largest-remainder apportionment so the wanted counts sum to total.
    uint64_t assigned = 0;
    std::vector<double> remainders(plans.size());
    for (size_t i = 0; i < plans.size(); ++i) {
        double exact = static_cast<double>(total) * plans[i].proportion;
        plans[i].wanted = static_cast<uint64_t>(exact);
        remainders[i] = exact - static_cast<double>(plans[i].wanted);
        assigned += plans[i].wanted;
    }
    while (assigned < total) {
        size_t best = 0;
        for (size_t i = 1; i < plans.size(); ++i)
            if (remainders[i] > remainders[best]) best = i;
        ++plans[best].wanted;
        remainders[best] = -1.0;
        ++assigned;
    }

    std::string shortfall;
    for (const auto& plan : plans) {
        if (plan.wanted > plan.available) {
            shortfall += std::string(shortfall.empty() ? "" : "; ") +
                         std::string(genre_name(plan.genre)) + " needs " +
                         std::to_string(plan.wanted) + " but has " +
                         std::to_string(plan.available);
        }
    }
    if (!shortfall.empty()) throw std::runtime_error("mix: insufficient data: " + shortfall);

    // Pass 2: selection sampling per genre (exact counts, input order kept).
    // Each genre draws from its own seeded stream, so adding a genre does not
    // disturb another genre's sample.
    std::vector<std::vector<TextRecord>> sampled(plans.size());
    for (size_t i = 0; i < plans.size(); ++i) {
        DetRng rng(mix_seed(seed, static_cast<uint64_t>(plans[i].genre) + 1));
        uint64_t remaining = plans[i].available;
        uint64_t needed = plans[i].wanted;
        sampled[i].reserve(needed);
        for (const auto& spec : inputs) {
            if (needed == 0) break;
            std::ifstream in(spec.path, std::ios::binary);
            if (!in) throw std::runtime_error("mix: cannot open " + spec.path);
            RecordReader reader(in, spec.format, spec.genre, spec.source);
            TextRecord rec;
            while (reader.next(rec)) {
                if (rec.genre != plans[i].genre) continue;
                if (remaining == 0) break;  // input grew between passes
                if (rng.below(remaining) < needed) {
                    sampled[i].push_back(rec);
                    --needed;
                }
                --remaining;
                if (needed == 0) break;
            }
        }
    }

    // Proportional interleave: always emit the genre lagging its share most.
    std::vector<uint64_t> emitted(plans.size(), 0);
    uint64_t written = 0;
    while (written < total) {
        size_t pick = plans.size();
        double best_deficit = -1e18;
        for (size_t i = 0; i < plans.size(); ++i) {
            if (emitted[i] >= plans[i].wanted) continue;
            double share = static_cast<double>(plans[i].wanted) / static_cast<double>(total);
            double deficit = static_cast<double>(written + 1) * share -
                             static_cast<double>(emitted[i]);
            if (deficit > best_deficit) {
                best_deficit = deficit;
                pick = i;
            }
        }
        if (pick == plans.size()) break;
        out.write(sampled[pick][emitted[pick]]);
        ++emitted[pick];
        ++written;
    }
    return written;
}

}  // namespace arprep::pipeline
