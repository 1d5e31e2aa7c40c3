// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_HASH128_HPP
#define ARPREP_HASH128_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace arprep {

struct Hash128 {
    uint64_t hi = 0;
    uint64_t lo = 0;

    friend bool operator==(const Hash128&, const Hash128&) = default;
    friend auto operator<=>(const Hash128&, const Hash128&) = default;

    // (hi:lo) mod m without 128-bit division.
    uint64_t mod(uint64_t m) const {
        unsigned __int128 v = (static_cast<unsigned __int128>(hi) << 64) | lo;
        return static_cast<uint64_t>(v % m);
    }

    std::string hex() const;
};

// MurmurHash3 x64 128-bit. Seed-stable across runs and platforms, which the
// dedup keys require; std::hash and absl::Hash give no such guarantee.
Hash128 murmur3_128(std::string_view data, uint64_t seed);

// Stable combiner for deriving per-shard seeds from a global one.
uint64_t mix_seed(uint64_t seed, uint64_t index);

struct Hash128Hasher {
    size_t operator()(const Hash128& h) const noexcept {
        return static_cast<size_t>(h.hi ^ (h.lo * 0x9E3779B97F4A7C15ULL));
    }
};

}  // namespace arprep

#endif  // ARPREP_HASH128_HPP
