// Copyright 2026 The qsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "qsynth/common.hpp"

namespace qsynth {

inline constexpr std::uint64_t kSeedGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer. Used both as the generator step and as the mixing
/// function of the seed-splitting rule.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += kSeedGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed-splitting rule: child(seed, k) = mix64(seed XOR mix64(k)).
/// Every parallel task derives its own stream this way, so serial and
/// parallel executions consume identical random numbers.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix64(parent ^ mix64(index));
}

inline std::uint64_t mix_double(std::uint64_t parent, double value) {
    return derive_seed(parent, std::bit_cast<std::uint64_t>(value));
}

/// Small counter-based PRNG (SplitMix64 stream). All randomness in the
/// library flows through this type; std:: distributions are avoided because
/// their output is implementation-defined and would break bit-exact
/// reproducibility of reports.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kSeedGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [0, high).
    double next_double(double high) { return next_double() * high; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double();  // (0, 1], keeps log() finite
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        have_spare_ = true;
        spare_ = r * std::sin(2.0 * pi * u2);
        return r * std::cos(2.0 * pi * u2);
    }

    cplx next_complex_gaussian() {
        // Unit-variance complex normal.
        return {next_gaussian() / std::sqrt(2.0), next_gaussian() / std::sqrt(2.0)};
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qsynth
