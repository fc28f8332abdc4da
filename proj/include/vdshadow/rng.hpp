// Copyright 2026 The vdshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VDSHADOW_RNG_H
#define VDSHADOW_RNG_H

#include <cstdint>

namespace vdshadow {

/// Deterministic 64-bit generator (xoshiro256** seeded through splitmix64).
///
/// The standard library distributions are implementation-defined, so all
/// sampling helpers live here to keep seeded runs reproducible across
/// toolchains. Independent streams are derived from (seed, salt words).
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto &word : s_) {
            word = splitmix64(x);
        }
    }

    /// Derives an independent stream from a master seed and salt words.
    static Rng stream(uint64_t seed, uint64_t salt_a, uint64_t salt_b = 0) {
        uint64_t x = seed;
        uint64_t mix = splitmix64(x) ^ (salt_a * 0x9e3779b97f4a7c15ULL);
        mix = splitmix64(mix) ^ (salt_b * 0xbf58476d1ce4e5b9ULL);
        return Rng(splitmix64(mix));
    }

    uint64_t next_u64() {
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    uint64_t next_below(uint64_t bound) {
        // Rejection sampling on the top of the range keeps the draw unbiased.
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    bool next_bool() {
        return (next_u64() >> 63) != 0;
    }

    /// Bernoulli draw with success probability p.
    bool next_bernoulli(double p) {
        return next_double() < p;
    }

  private:
    static uint64_t rotl(uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    static uint64_t splitmix64(uint64_t &state) {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
};

}  // namespace vdshadow

#endif
