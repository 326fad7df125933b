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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "dynatomo/rng.hpp"
#include "dynatomo/rud_tomography.hpp"

using dynatomo::Rng;

TEST(Rng, SameSeedSameStream) {
    Rng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsDiffer) {
    Rng a(42, 1), b(42, 2);
    int equal = 0;
    for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
    EXPECT_EQ(equal, 0);
}

TEST(Rng, UniformStaysInUnitInterval) {
    Rng r(1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 5e-3);
}

TEST(Rng, NormalMoments) {
    Rng r(3);
    double s = 0.0, s2 = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 1e-2);
    EXPECT_NEAR(s2 / n, 1.0, 2e-2);
}

TEST(Rng, CountSuccessesEdgeCases) {
    Rng r(5);
    EXPECT_EQ(r.count_successes(1000, 0.0), 0u);
    EXPECT_EQ(r.count_successes(1000, 1.0), 1000u);
}

TEST(Rng, DerivedSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(Rng::derive_seed(9, i));
    EXPECT_EQ(seen.size(), 1000u);
}

TEST(RunTrials, ResultDoesNotDependOnThreadCount) {
    auto trial = [](std::size_t i, std::uint64_t seed) {
        Rng r(seed);
        return static_cast<double>(i) + r.uniform();
    };
    const auto serial = dynatomo::run_trials(64, 11, trial, 1);
    const auto parallel = dynatomo::run_trials(64, 11, trial, 4);
    EXPECT_EQ(serial, parallel);
}

TEST(RunTrials, PropagatesFailures) {
    auto trial = [](std::size_t i, std::uint64_t) -> int {
        if (i == 3) throw std::runtime_error("boom");
        return 0;
    };
    EXPECT_THROW(dynatomo::run_trials(8, 1, trial, 2), std::runtime_error);
}
