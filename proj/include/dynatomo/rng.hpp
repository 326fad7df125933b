// Copyright 2026 The Dynatomo Authors
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

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dynatomo {

/// Counter-based generator: the k-th output of stream (seed, stream) is
/// splitmix64(key + k * golden), so every stream is reproducible bit for bit
/// on any platform and can be split without consuming state.
///
/// The standard library distributions are not used because their output is
/// implementation defined.
class Rng {
   public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + kGolden))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += kGolden;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Seed of the index-th child of a master seed. Used to give independent
    /// trials their own stream regardless of execution order.
    static constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
        return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
    }

    Rng split(std::uint64_t index) const { return Rng(key_, index + 1); }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one pair of uniforms per draw.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Number of successes in `trials` independent Bernoulli(p) draws.
    std::uint64_t count_successes(std::uint64_t trials, double p) {
        std::uint64_t hits = 0;
        for (std::uint64_t k = 0; k < trials; ++k) hits += bernoulli(p) ? 1 : 0;
        return hits;
    }

    std::uint64_t position() const { return counter_; }

   private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dynatomo
