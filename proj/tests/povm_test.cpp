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
#include <numbers>

#include "dynatomo/avgchannel.hpp"
#include "dynatomo/example48.hpp"
#include "dynatomo/povm.hpp"
#include "test_support.hpp"

using namespace dynatomo;
using dynatomo::testing::to_eigen;

namespace {

CVector basis_vector(std::size_t d, std::size_t k) {
    CVector v(d);
    v[k] = 1.0;
    return v;
}

ProjectorFamily orthonormal_family(std::size_t d) {
    std::vector<SubnormalizedProjector> ps;
    for (std::size_t k = 0; k < d; ++k) ps.push_back({1.0, basis_vector(d, k)});
    return ProjectorFamily(d, ps);
}

CMatrix povm_sum(const Povm &p) {
    CMatrix s(p.dimension, p.dimension);
    for (const auto &e : p.elements) s += e;
    return s;
}

}  // namespace

TEST(ProjectorFamily, RejectsBadInput) {
    EXPECT_THROW(ProjectorFamily(2, {}), Error);
    EXPECT_THROW(ProjectorFamily(2, {{0.0, basis_vector(2, 0)}}), Error);
    EXPECT_THROW(ProjectorFamily(2, {{1.0, CVector{1.0, 1.0}}}), Error);
    EXPECT_THROW(ProjectorFamily(2, {{1.0, basis_vector(3, 0)}}), Error);
}

TEST(FrameOperator, OrthonormalBasisResolvesIdentity) {
    EXPECT_LT(max_abs(frame_operator(orthonormal_family(2)) - CMatrix::identity(2)), 1e-15);
}

TEST(FrameOperator, SingleProjector) {
    const ProjectorFamily fam(2, {{1.0, basis_vector(2, 0)}});
    EXPECT_LT(max_abs(frame_operator(fam) - CMatrix{{1.0, 0.0}, {0.0, 0.0}}), 1e-15);
}

TEST(FrameOperator, QutritFamilyHasUnitDiagonalAndOneThirdCoupling) {
    const CMatrix e = example48::frame_from_vectors();
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(e(k, k) - 1.0), 0.0, 1e-12);
    // The coupling is -1/3 on one off-diagonal pair and 0 elsewhere. The
    // pair the nine vectors produce is (1,2); see the example header.
    EXPECT_NEAR(std::abs(e(0, 1) + 1.0 / 3.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e(1, 0) + 1.0 / 3.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e(0, 2)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e(1, 2)), 0.0, 1e-12);
}

TEST(FrameOperator, MatchesDirectSumOfOuterProducts) {
    const auto fam = random_projector_family(3, 11, 4);
    Eigen::MatrixXcd oracle = Eigen::MatrixXcd::Zero(3, 3);
    for (const auto &p : fam.projectors()) {
        Eigen::VectorXcd v(3);
        for (Eigen::Index k = 0; k < 3; ++k) v(k) = p.direction[static_cast<std::size_t>(k)];
        oracle += p.weight * v * v.adjoint();
    }
    EXPECT_LT((to_eigen(frame_operator(fam)) - oracle).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AssertPositiveDefinite, QutritFrame) {
    const auto ev = assert_positive_definite(to_complex(example48::frame_closed_form()));
    EXPECT_NEAR(ev[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(ev[1], 1.0, 1e-12);
    EXPECT_NEAR(ev[2], 4.0 / 3.0, 1e-12);
}

TEST(AssertPositiveDefinite, RankDeficientFails) {
    EXPECT_THROW(assert_positive_definite(CMatrix{{1.0, 0.0}, {0.0, 0.0}}), Error);
}

TEST(AssertPositiveDefinite, Identity) {
    for (double v : assert_positive_definite(CMatrix::identity(4))) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(AssertPositiveDefinite, FewerThanDDirectionsFails) {
    const ProjectorFamily fam(3, {{1.0, basis_vector(3, 0)}, {0.5, basis_vector(3, 1)}, {2.0, basis_vector(3, 0)}});
    EXPECT_THROW(assert_positive_definite(frame_operator(fam)), Error);
}

TEST(CanonicalIcPovm, OrthonormalBasisGivesProjectiveMeasurement) {
    const auto povm = canonical_ic_povm(orthonormal_family(3));
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_LT(max_abs(povm.elements[k] - projector(basis_vector(3, k))), 1e-14);
}

TEST(CanonicalIcPovm, QutritFamilySumsToIdentityAndIsIc) {
    const auto povm = canonical_ic_povm(example48::family());
    EXPECT_LT(max_abs(povm_sum(povm) - CMatrix::identity(3)), 1e-12);
    const auto ic = is_ic(povm.elements);
    EXPECT_TRUE(ic.informationally_complete);
    EXPECT_EQ(ic.rank, 9u);
}

TEST(CanonicalIcPovm, WeightScalingInvariance) {
    const auto fam = random_projector_family(3, 10, 21);
    const auto base = canonical_ic_povm(fam);
    for (double c : {0.1, 7.3}) {
        const auto scaled = canonical_ic_povm(fam.scaled(c));
        for (std::size_t i = 0; i < fam.size(); ++i)
            EXPECT_LT(max_abs(scaled.elements[i] - base.elements[i]), 1e-10);
    }
}

TEST(CanonicalIcPovm, RandomFamiliesGiveValidPovms) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t d = 2 + seed % 3;
        const auto fam = random_projector_family(d, d * d + seed % 3, seed);
        const auto povm = canonical_ic_povm(fam);
        EXPECT_LT(frobenius_norm(povm_sum(povm) - CMatrix::identity(d)), 1e-10);
        for (const auto &e : povm.elements) EXPECT_GE(hermitian_eigen(e).eigenvalues.front(), -1e-10);
        // Rank is preserved by the congruence with P^{-1/2}.
        EXPECT_EQ(is_ic(povm.elements).informationally_complete, is_ic(fam.matrices()).informationally_complete);
    }
}

TEST(IsIc, TooFewElements) {
    const auto fam = random_projector_family(3, 8, 3);
    const auto r = is_ic(fam.matrices());
    EXPECT_FALSE(r.informationally_complete);
    EXPECT_LE(r.rank, 8u);
}

TEST(IsIc, RepeatedIdentity) {
    std::vector<CMatrix> ids(9, CMatrix::identity(3));
    const auto r = is_ic(ids);
    EXPECT_FALSE(r.informationally_complete);
    EXPECT_EQ(r.rank, 1u);
}

TEST(SicCheck, QubitFiducialOrbit) {
    const WeylHeisenbergBasis basis(2);
    const auto r = sic_check(orbit(basis, builtin_fiducial(2)));
    EXPECT_TRUE(r.is_sic);
    EXPECT_LT(r.max_pairwise_deviation, 1e-12);
}

TEST(SicCheck, QutritFiducialOrbit) {
    const WeylHeisenbergBasis basis(3);
    const auto states = orbit(basis, builtin_fiducial(3));
    const auto r = sic_check(states);
    EXPECT_TRUE(r.is_sic);
    EXPECT_NEAR(abs2(inner(states[0], states[4])), 0.25, 1e-12);
}

TEST(SicCheck, ComputationalBasisRepeatedIsNotSic) {
    std::vector<CVector> states;
    for (int rep = 0; rep < 2; ++rep)
        for (std::size_t k = 0; k < 2; ++k) states.push_back(basis_vector(2, k));
    EXPECT_FALSE(sic_check(states).is_sic);
}

TEST(SicCheck, WrongCountThrows) {
    EXPECT_THROW(sic_check(std::vector<CVector>{basis_vector(2, 0)}), Error);
}
