// Copyright 2026 The arprep Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ARPREP_RNG_HPP
#define ARPREP_RNG_HPP

#include <cstdint>
#include <random>

namespace arprep {

// mt19937_64 with explicit draw arithmetic. The standard pins the engine's
// output sequence, and doing the uniform mapping ourselves keeps results
// identical across standard libraries (std::*_distribution is not portable).
class DetRng {
public:
    explicit DetRng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) via rejection.
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = eng_();
        } while (r >= limit);
        return r % n;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace arprep

#endif  // ARPREP_RNG_HPP
