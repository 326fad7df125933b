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
#include <numeric>

#include "dynatomo/rng.hpp"
#include "dynatomo/schedule.hpp"

using namespace dynatomo;

namespace {

std::vector<double> integer_thetas(std::size_t count) {
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i + 1);
    return t;
}

}  // namespace

TEST(ExpDecaySchedule, AtZeroAllMassOnLastOutcome) {
    const ExpDecaySchedule s(integer_thetas(8));
    const auto mu = s.mu(0.0);
    ASSERT_EQ(mu.size(), 9u);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(mu[i], 0.0);
    EXPECT_DOUBLE_EQ(mu[8], 1.0);
}

TEST(ExpDecaySchedule, LongTimeLimitIsUniform) {
    const ExpDecaySchedule s(integer_thetas(8));
    for (double m : s.mu(200.0)) EXPECT_NEAR(m, 1.0 / 9.0, 1e-15);
}

TEST(ExpDecaySchedule, DirectEvaluation) {
    const ExpDecaySchedule s(integer_thetas(8));
    EXPECT_NEAR(s.mu(1.0)[0], (1.0 - std::exp(-1.0)) / 9.0, 1e-15);
    EXPECT_NEAR(s.mu(1.0)[0], 0.0702356, 5e-7);
}

TEST(ExpDecaySchedule, NegativeTimeThrows) {
    const ExpDecaySchedule s(integer_thetas(2));
    try {
        s.mu(-1.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NegativeTime);
    }
}

TEST(ExpDecaySchedule, RejectsRepeatedOrNonPositiveRates) {
    EXPECT_THROW(ExpDecaySchedule({1.0, 1.0}), Error);
    EXPECT_THROW(ExpDecaySchedule({0.0, 1.0}), Error);
}

TEST(ExpDecaySchedule, RandomDrawsAreProbabilityVectors) {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t x = 2 + static_cast<std::size_t>(trial % 5);
        std::vector<double> thetas;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < x; ++i) thetas.push_back(acc += rng.uniform(0.01, 3.0));
        const auto mu = ExpDecaySchedule(thetas).mu(rng.uniform(0.0, 10.0));
        for (double m : mu) EXPECT_GE(m, 0.0);
        EXPECT_NEAR(std::accumulate(mu.begin(), mu.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(ExpDecaySchedule, DefaultsAndMatchedGrid) {
    const auto s = ExpDecaySchedule::with_defaults(4);
    EXPECT_EQ(s.thetas(), (std::vector<double>{1.0, 4.0, 16.0}));
    const auto g = TimeGrid::matched_to(s);
    EXPECT_EQ(g.instants(), (std::vector<double>{0.0, 0.125, 0.5, 2.0}));
}

TEST(TimeGrid, RejectsDuplicatesAndNegatives) {
    EXPECT_THROW(TimeGrid({0.1, 0.1}), Error);
    EXPECT_THROW(TimeGrid({-0.1, 0.1}), Error);
    EXPECT_EQ(TimeGrid::uniform(3, 0.5, 0.25).instants(), (std::vector<double>{0.5, 0.75, 1.0}));
}

TEST(DesignK, TwoByTwoClosedForm) {
    const ExpDecaySchedule s({1.0});
    const double t1 = 0.3, t2 = 1.7;
    const auto k = build_design_K(s, TimeGrid({t1, t2}), std::vector<double>{1.0, 1.0});
    EXPECT_NEAR(k.det, (std::exp(-t2) - std::exp(-t1)) / 2.0, 1e-15);
}

TEST(DesignK, EqualRowsAreSingular) {
    const ExpDecaySchedule s({1.0});
    const auto mu = s.mu(0.4);
    RMatrix m{{mu[0], mu[1]}, {mu[0], mu[1]}};
    try {
        certify_design(m);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularDesign);
    }
}

TEST(DesignK, WeightScalingMultipliesDeterminant) {
    const auto s = ExpDecaySchedule::with_defaults(4);
    const auto g = TimeGrid::matched_to(s);
    const auto base = build_design_K(s, g, std::vector<double>(4, 1.0));
    const double c = 2.5;
    const auto scaled = build_design_K(s, g, std::vector<double>(4, c));
    EXPECT_NEAR(scaled.det, base.det * std::pow(c, -4.0), 1e-12 * std::abs(base.det));
}

TEST(DesignK, DeterminantFactorizesOverWeights) {
    const auto s = ExpDecaySchedule::with_defaults(5);
    const auto g = TimeGrid::matched_to(s);
    const std::vector<double> p{0.7, 1.0, 1.9, 0.4, 1.3};
    const auto k = build_design_K(s, g, p);
    RMatrix mu(5, 5);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto row = s.mu(g[i]);
        for (std::size_t j = 0; j < 5; ++j) mu(i, j) = row[j];
    }
    double prod = 1.0;
    for (double w : p) prod /= w;
    const double expected = prod * determinant(mu);
    EXPECT_NEAR(k.det, expected, 1e-10 * std::abs(expected));
}

TEST(DesignK, GenericGridsAreInvertible) {
    Rng rng(41);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t x = 2 + static_cast<std::size_t>(trial % 5);
        const auto s = ExpDecaySchedule(integer_thetas(x - 1));
        std::vector<double> t;
        double acc = 0.0;
        for (std::size_t i = 0; i < x; ++i) t.push_back(acc += rng.uniform(0.05, 1.0));
        try {
            build_design_K(s, TimeGrid(t), std::vector<double>(x, 1.0));
        } catch (const Error &) {
            ++failures;
        }
    }
    EXPECT_LT(failures, 1);
}

TEST(AverageChannelWeights, RowsSumToOne) {
    Rng rng(5);
    for (std::size_t d : {2u, 3u, 4u}) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> l(d * d);
            for (auto &x : l) x = rng.uniform();
            const auto mu = average_channel_weights(l, d);
            EXPECT_NEAR(std::accumulate(mu.begin(), mu.end(), 0.0), 1.0, 1e-12);
            for (double m : mu) EXPECT_GE(m, 0.0);
        }
    }
}

TEST(AverageChannelWeights, RejectsOutOfRange) {
    EXPECT_THROW(average_channel_weights(std::vector<double>{1.2, 0.0, 0.0, 0.0}, 2), Error);
}

TEST(DesignU, ExplicitGridIsInvertibleWithUnitRowSums) {
    const auto fam = DecayFamily::exponential({1.0, 2.0, 3.0, 4.0});
    const auto u = build_design_U(fam, TimeGrid({0.1, 0.2, 0.3, 0.4}), 2);
    EXPECT_NE(u.det, 0.0);
    EXPECT_EQ(u.det, determinant(u.matrix));
    for (std::size_t i = 0; i < 4; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < 4; ++a) s += u.matrix(i, a);
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(DesignU, ConstantDecayIsSingular) {
    const auto fam = DecayFamily::constant(4, 0.5);
    EXPECT_THROW(build_design_U(fam, TimeGrid({0.1, 0.2, 0.3, 0.4}), 2), Error);
}

TEST(DesignU, DefaultFamilyAndGrid) {
    for (std::size_t d : {2u, 3u}) {
        const auto fam = DecayFamily::default_for(d);
        const auto grid = default_channel_grid(fam);
        EXPECT_EQ(grid.size(), d * d);
        EXPECT_NO_THROW(build_design_U(fam, grid, d));
    }
}
