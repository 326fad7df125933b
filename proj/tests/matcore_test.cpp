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

#include "dynatomo/example48.hpp"
#include "dynatomo/matcore.hpp"
#include "test_support.hpp"

using namespace dynatomo;
using dynatomo::testing::from_eigen;
using dynatomo::testing::random_hermitian;
using dynatomo::testing::to_eigen;

namespace {
const cplx I{0.0, 1.0};
}

TEST(Adjoint, Identity) { EXPECT_EQ(adjoint(CMatrix::identity(2)), CMatrix::identity(2)); }

TEST(Adjoint, RealUpperShift) {
    const CMatrix a{{0.0, 1.0}, {0.0, 0.0}};
    const CMatrix expected{{0.0, 0.0}, {1.0, 0.0}};
    EXPECT_EQ(adjoint(a), expected);
}

TEST(Adjoint, QubitXZ) {
    const CMatrix xz{{0.0, -1.0}, {1.0, 0.0}};
    const CMatrix expected{{0.0, 1.0}, {-1.0, 0.0}};
    EXPECT_EQ(adjoint(xz), expected);
}

TEST(Adjoint, ConjugatesComplexEntries) {
    const CMatrix a{{1.0 + 2.0 * I, 3.0}, {I, 4.0 - I}};
    EXPECT_LT(max_abs(adjoint(a) - from_eigen(to_eigen(a).adjoint())), 1e-15);
}

TEST(FrobeniusInner, IdentityGivesDimension) {
    EXPECT_NEAR(std::abs(frobenius_inner(CMatrix::identity(4), CMatrix::identity(4)) - cplx(4.0)), 0.0, 1e-15);
}

TEST(FrobeniusInner, DistinctQubitDisplacementsAreOrthogonal) {
    const CMatrix z{{1.0, 0.0}, {0.0, -1.0}};  // M_01
    const CMatrix x{{0.0, 1.0}, {1.0, 0.0}};   // M_10
    EXPECT_NEAR(std::abs(frobenius_inner(z, x)), 0.0, 1e-15);
}

TEST(FrobeniusInner, SelfInnerIsSumOfSquaredModuli) {
    const CMatrix a{{1.0, I}, {0.0, 2.0}};
    EXPECT_NEAR(std::abs(frobenius_inner(a, a) - cplx(6.0)), 0.0, 1e-15);
}

TEST(FrobeniusInner, ShapeMismatchThrows) {
    EXPECT_THROW(frobenius_inner(CMatrix::identity(2), CMatrix::identity(3)), Error);
}

TEST(HermitianEigen, DiagonalInputSortsAscending) {
    const auto eig = hermitian_eigen(CMatrix{{3.0, 0.0}, {0.0, 1.0}});
    ASSERT_EQ(eig.eigenvalues.size(), 2u);
    EXPECT_NEAR(eig.eigenvalues[0], 1.0, 1e-14);
    EXPECT_NEAR(eig.eigenvalues[1], 3.0, 1e-14);
}

TEST(HermitianEigen, PauliX) {
    const auto eig = hermitian_eigen(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
    EXPECT_NEAR(eig.eigenvalues[0], -1.0, 1e-14);
    EXPECT_NEAR(eig.eigenvalues[1], 1.0, 1e-14);
}

TEST(HermitianEigen, QutritFrameSpectrum) {
    // Both the displayed frame operator and the one summed from the vectors
    // have the 2x2 block spectrum 1 +- 1/3.
    for (const CMatrix &e : {to_complex(example48::frame_closed_form()), example48::frame_from_vectors()}) {
        const auto eig = hermitian_eigen(e);
        EXPECT_NEAR(eig.eigenvalues[0], 2.0 / 3.0, 1e-12);
        EXPECT_NEAR(eig.eigenvalues[1], 1.0, 1e-12);
        EXPECT_NEAR(eig.eigenvalues[2], 4.0 / 3.0, 1e-12);
    }
}

TEST(HermitianEigen, RejectsNonHermitian) {
    EXPECT_THROW(hermitian_eigen(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), Error);
}

TEST(HermitianEigen, AgreesWithEigenOnRandomMatrices) {
    Rng rng(2024);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t d = 1 + static_cast<std::size_t>(trial % 8);
        const CMatrix a = random_hermitian(d, rng);
        const auto eig = hermitian_eigen(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> oracle(to_eigen(a));
        const double scale = std::max(1.0, frobenius_norm(a));
        for (std::size_t k = 0; k < d; ++k)
            EXPECT_NEAR(eig.eigenvalues[k], oracle.eigenvalues()(static_cast<Eigen::Index>(k)), 1e-10 * scale);

        const CMatrix &v = eig.eigenvectors;
        EXPECT_LT(frobenius_norm(adjoint(v) * v - CMatrix::identity(d)), 1e-10);
        const RVector &lam = eig.eigenvalues;
        std::vector<cplx> diag(lam.begin(), lam.end());
        const CMatrix recon = v * CMatrix::diagonal(diag) * adjoint(v);
        EXPECT_LT(frobenius_norm(recon - a), 1e-10 * scale);
    }
}

TEST(InvSqrtPd, Identity) { EXPECT_LT(max_abs(inv_sqrt_pd(CMatrix::identity(3)) - CMatrix::identity(3)), 1e-14); }

TEST(InvSqrtPd, Diagonal) {
    const CMatrix r = inv_sqrt_pd(CMatrix{{4.0, 0.0}, {0.0, 1.0}});
    EXPECT_LT(max_abs(r - CMatrix{{0.5, 0.0}, {0.0, 1.0}}), 1e-14);
}

TEST(InvSqrtPd, QutritClosedForm) {
    const CMatrix r = inv_sqrt_pd(to_complex(example48::frame_closed_form()));
    const double kappa = std::sqrt(9.0 + 6.0 * std::numbers::sqrt2) / 4.0;
    const double sigma = std::sqrt(9.0 - 6.0 * std::numbers::sqrt2) / 4.0;
    EXPECT_NEAR(std::abs(r(0, 0) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r(1, 1) - kappa), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r(2, 2) - kappa), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r(1, 2) - sigma), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r(2, 1) - sigma), 0.0, 1e-12);
}

TEST(InvSqrtPd, RandomPositiveDefinite) {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + static_cast<std::size_t>(trial % 6);
        const CMatrix g = random_gaussian_matrix(d, d, rng);
        const CMatrix a = g * adjoint(g) + CMatrix::identity(d) * cplx(0.1);
        const CMatrix r = inv_sqrt_pd(a);
        EXPECT_LT(frobenius_norm(r * r * a - CMatrix::identity(d)), 1e-9);
        EXPECT_LT(frobenius_norm(r * a * r - CMatrix::identity(d)), 1e-9);
        EXPECT_LT(hermiticity_defect(r), 1e-12);
    }
}

TEST(InvSqrtPd, RejectsSingular) {
    EXPECT_THROW(inv_sqrt_pd(CMatrix{{1.0, 0.0}, {0.0, 0.0}}), Error);
}

TEST(Vectorize, IdentityAndEntries) {
    const CMatrix v = vectorize(CMatrix::identity(2));
    ASSERT_EQ(v.rows(), 4u);
    ASSERT_EQ(v.cols(), 1u);
    EXPECT_EQ(v, (CMatrix{{1.0}, {0.0}, {0.0}, {1.0}}));
    const CMatrix abcd{{1.0, 2.0}, {3.0, 4.0}};
    EXPECT_EQ(vectorize(abcd), (CMatrix{{1.0}, {2.0}, {3.0}, {4.0}}));
}

TEST(Vectorize, RoundTrip) {
    Rng rng(8);
    const CMatrix a = random_gaussian_matrix(3, 3, rng);
    EXPECT_EQ(devectorize(vectorize(a)), a);
}

TEST(SolveLinear, RecoversRandomSolutions) {
    Rng rng(5);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        const CMatrix a = random_gaussian_matrix(n, n, rng);
        if (condition_number(a) >= 1e6) continue;
        const CMatrix xm = random_gaussian_matrix(n, 1, rng);
        const CVector x = xm.column(0);
        const CVector b = apply<cplx>(a, x);
        const CVector got = solve_linear(a, b);
        double err = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            err += abs2(got[k] - x[k]);
            norm += abs2(x[k]);
        }
        EXPECT_LT(std::sqrt(err / norm), 1e-10);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(SolveLinear, SingularThrows) {
    const RMatrix a{{1.0, 2.0}, {2.0, 4.0}};
    EXPECT_THROW(solve_linear(a, RVector{1.0, 1.0}), Error);
}

TEST(Determinant, AgreesWithEigen) {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
        const CMatrix a = random_gaussian_matrix(n, n, rng);
        const cplx expected = to_eigen(a).determinant();
        EXPECT_LT(std::abs(determinant(a) - expected), 1e-10 * std::max(1.0, std::abs(expected)));
    }
}

TEST(Inverse, AgreesWithEigen) {
    Rng rng(13);
    const CMatrix a = random_gaussian_matrix(5, 5, rng);
    EXPECT_LT(max_abs(inverse(a) - from_eigen(to_eigen(a).inverse())), 1e-10);
}

TEST(SingularValues, AgreeWithEigen) {
    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t rows = 2 + static_cast<std::size_t>(trial % 5);
        const std::size_t cols = 2 + static_cast<std::size_t>((trial * 3) % 5);
        const CMatrix a = random_gaussian_matrix(rows, cols, rng);
        const auto got = singular_values(a);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a));
        const auto &s = svd.singularValues();
        ASSERT_GE(got.size(), static_cast<std::size_t>(s.size()));
        for (Eigen::Index k = 0; k < s.size(); ++k) EXPECT_NEAR(got[static_cast<std::size_t>(k)], s(k), 1e-10);
    }
}

TEST(LeastSquares, MatchesEigenSolution) {
    Rng rng(15);
    const CMatrix a = random_gaussian_matrix(9, 4, rng);
    const CVector b = random_gaussian_matrix(9, 1, rng).column(0);
    const CVector got = lstsq_via_normal_equations(a, b);
    Eigen::VectorXcd eb(9);
    for (Eigen::Index k = 0; k < 9; ++k) eb(k) = b[static_cast<std::size_t>(k)];
    const Eigen::VectorXcd expected = to_eigen(a).colPivHouseholderQr().solve(eb);
    for (Eigen::Index k = 0; k < 4; ++k) EXPECT_LT(std::abs(got[static_cast<std::size_t>(k)] - expected(k)), 1e-10);
}

TEST(RandomDensityMatrix, IsAState) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t d = 2 + seed % 5;
        const CMatrix rho = random_density_matrix(d, seed);
        EXPECT_LT(hermiticity_defect(rho), 1e-14);
        EXPECT_NEAR(trace(rho).real(), 1.0, 1e-12);
        EXPECT_NEAR(trace(rho).imag(), 0.0, 1e-12);
        EXPECT_GE(hermitian_eigen(rho).eigenvalues.front(), -1e-12);
    }
}

TEST(RandomDensityMatrix, Deterministic) { EXPECT_EQ(random_density_matrix(3, 99), random_density_matrix(3, 99)); }
