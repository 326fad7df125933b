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

// Quasi-Householder unitaries mapping one normalized direction onto another.
//
// Given the canonical POVM Q_i = p_i P^{-1/2}|a_i><a_i|P^{-1/2}, write
// P^{-1/2}|a_i> = lambda_i |b_i> with |b_i> a unit vector. For a reference
// index j we build, for every i, a unitary
//
//     Hhat_i = conj(eta_i) (I - 2|w><w|)   with   Hhat_i |b_j> = |b_i>,
//
// where conj(eta_i) <b_i|b_j> is real. Then Q_i = pt_i Hhat_i Q_j Hhat_i^dagger
// with pt_i = p_i |lambda_i|^2 / (p_j |lambda_j|^2), and the dynamics use
// H_i = Hhat_i^dagger.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynatomo/matcore.hpp"
#include "dynatomo/povm.hpp"

namespace dynatomo {

struct NormalizedDirection {
    double norm = 0.0;  // |lambda_i|
    cplx phase{1.0};    // z_i
    CVector b;          // z_i v / |v|

    /// lambda_i = |lambda_i| / z_i, so that lambda_i |b_i> = v.
    cplx lambda() const { return norm / phase; }
};

inline constexpr double kZeroVectorThreshold = 1e-13;
inline constexpr double kRealityTolerance = 1e-12;
inline constexpr double kCase1Tolerance = 1e-10;
inline constexpr double kMappingTolerance = 1e-10;
inline constexpr double kConjugationTolerance = 1e-9;

inline NormalizedDirection normalize_direction(std::span<const cplx> v, cplx z = 1.0) {
    if (std::abs(std::abs(z) - 1.0) > kUnitNormTolerance) {
        throw Error(ErrorCode::InvalidArgument, "phase z must have unit modulus");
    }
    const double n = vector_norm(v);
    if (n <= kZeroVectorThreshold) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
    return {n, z, scaled(v, z / n)};
}

/// Default: eta = <b_i|b_j> / |<b_i|b_j>| so that conj(eta)<b_i|b_j> >= 0,
/// or 1 when the vectors are orthogonal. An override is accepted when it has
/// unit modulus and makes conj(eta)<b_i|b_j> real within 1e-12.
inline cplx choose_eta(std::span<const cplx> b_i, std::span<const cplx> b_j,
                       std::optional<cplx> override_eta = std::nullopt) {
    const cplx overlap = inner(b_i, b_j);
    if (override_eta) {
        const cplx eta = *override_eta;
        if (std::abs(std::abs(eta) - 1.0) > kRealityTolerance ||
            std::abs((std::conj(eta) * overlap).imag()) > kRealityTolerance) {
            throw Error(ErrorCode::OverrideViolatesReality, "conj(eta) <b_i|b_j> is not real");
        }
        return eta;
    }
    const double mag = std::abs(overlap);
    if (mag > kZeroVectorThreshold) return overlap / mag;
    return 1.0;
}

enum class HouseholderCase { Case1, Case2 };

struct QuasiHouseholder {
    cplx eta{1.0};
    HouseholderCase kind = HouseholderCase::Case2;
    CVector reflector;  // unit w in conj(eta)(I - 2|w><w|)
    CMatrix matrix;
};

namespace detail {

inline CMatrix quasi_householder_matrix(cplx eta, std::span<const cplx> w) {
    CMatrix m = CMatrix::identity(w.size()) - 2.0 * projector(w);
    m *= std::conj(eta);
    return m;
}

// Standard basis vector least aligned with b (lowest index on ties),
// orthogonalized against b.
inline CVector default_orthogonal_direction(std::span<const cplx> b) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < b.size(); ++k)
        if (std::abs(b[k]) < std::abs(b[best])) best = k;
    CVector u(b.size(), cplx{});
    u[best] = 1.0;
    const cplx proj = std::conj(b[best]);  // <b|e_best>
    for (std::size_t k = 0; k < b.size(); ++k) u[k] -= b[k] * proj;
    const double n = vector_norm(u);
    for (auto &x : u) x /= n;
    return u;
}

}  // namespace detail

/// Case 1 (|b_j> - eta|b_i> below case1_tol): reflect through a unit vector
/// orthogonal to b_j. Case 2: reflect along (|b_j> - eta|b_i>) normalized.
inline QuasiHouseholder build_quasi_householder(std::span<const cplx> b_i, std::span<const cplx> b_j, cplx eta,
                                                double case1_tol = kCase1Tolerance,
                                                std::optional<CVector> u_tilde_override = std::nullopt) {
    const std::size_t d = b_j.size();
    if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "quasi-Householder synthesis needs d >= 2");
    if (b_i.size() != d) throw Error(ErrorCode::ShapeMismatch, "direction lengths differ");
    if (std::abs((std::conj(eta) * inner(b_i, b_j)).imag()) > kRealityTolerance) {
        throw Error(ErrorCode::RealityViolated, "conj(eta) <b_i|b_j> is not real");
    }

    CVector diff(b_j.begin(), b_j.end());
    for (std::size_t k = 0; k < d; ++k) diff[k] -= eta * b_i[k];
    const double gap = vector_norm(diff);

    QuasiHouseholder out;
    out.eta = eta;
    if (gap < case1_tol) {
        out.kind = HouseholderCase::Case1;
        if (u_tilde_override) {
            CVector u = *u_tilde_override;
            if (u.size() != d) throw Error(ErrorCode::ShapeMismatch, "u_tilde override has the wrong length");
            const double n = vector_norm(u);
            if (std::abs(n - 1.0) > kUnitNormTolerance) {
                throw Error(ErrorCode::InvalidArgument, "u_tilde override is not a unit vector");
            }
            if (std::abs(inner(u, b_j)) > kRealityTolerance) {
                throw Error(ErrorCode::OverrideNotOrthogonal, "u_tilde override is not orthogonal to b_j");
            }
            out.reflector = std::move(u);
        } else {
            out.reflector = detail::default_orthogonal_direction(b_j);
        }
    } else {
        out.kind = HouseholderCase::Case2;
        for (auto &x : diff) x /= gap;
        out.reflector = std::move(diff);
    }
    out.matrix = detail::quasi_householder_matrix(eta, out.reflector);

    const CVector image = apply<cplx>(out.matrix, b_j);
    CVector miss(image);
    for (std::size_t k = 0; k < d; ++k) miss[k] -= b_i[k];
    if (vector_norm(miss) > kMappingTolerance) {
        throw Error(ErrorCode::CertificationFailed, "Hhat |b_j> differs from |b_i>");
    }
    return out;
}

struct DirectionOverrides {
    std::optional<cplx> z;
    std::optional<cplx> eta;
    std::optional<CVector> u_tilde;
};

struct QuasiHouseholderSet {
    std::size_t reference = 0;  // j, zero based
    std::vector<NormalizedDirection> directions;
    std::vector<QuasiHouseholder> reflections;  // Hhat_i
    std::vector<double> p_tilde;
    double max_conjugation_residual = 0.0;

    /// H_i = Hhat_i^dagger, the unitaries driving the random unitary dynamics.
    std::vector<CMatrix> dynamics() const {
        std::vector<CMatrix> out;
        out.reserve(reflections.size());
        for (const auto &r : reflections) out.push_back(adjoint(r.matrix));
        return out;
    }
};

/// Builds Hhat_i for every i with reference index j (zero based) and
/// certifies Q_i = pt_i Hhat_i Q_j Hhat_i^dagger within 1e-9.
/// `overrides` is keyed by zero-based index.
inline QuasiHouseholderSet build_set(const ProjectorFamily &fam, std::size_t j, const CMatrix &p_inv_sqrt,
                                     const std::map<std::size_t, DirectionOverrides> &overrides = {}) {
    if (fam.dimension() < 2) throw Error(ErrorCode::DimensionTooSmall, "quasi-Householder synthesis needs d >= 2");
    if (j >= fam.size()) throw Error(ErrorCode::InvalidArgument, "reference index out of range");
    if (p_inv_sqrt.rows() != fam.dimension() || !p_inv_sqrt.is_square()) {
        throw Error(ErrorCode::ShapeMismatch, "P^{-1/2} has the wrong shape");
    }
    const std::size_t x = fam.size();
    auto find = [&](std::size_t i) -> const DirectionOverrides * {
        const auto it = overrides.find(i);
        return it == overrides.end() ? nullptr : &it->second;
    };

    QuasiHouseholderSet set;
    set.reference = j;
    set.directions.reserve(x);
    for (std::size_t i = 0; i < x; ++i) {
        const auto *ov = find(i);
        const cplx z = ov && ov->z ? *ov->z : cplx(1.0);
        set.directions.push_back(normalize_direction(apply<cplx>(p_inv_sqrt, fam[i].direction), z));
    }

    const auto &bj = set.directions[j].b;
    const double ref_weight = fam[j].weight * set.directions[j].norm * set.directions[j].norm;
    for (std::size_t i = 0; i < x; ++i) {
        const auto *ov = find(i);
        const auto &bi = set.directions[i].b;
        const cplx eta = choose_eta(bi, bj, ov ? ov->eta : std::nullopt);
        set.reflections.push_back(
            build_quasi_householder(bi, bj, eta, kCase1Tolerance, ov ? ov->u_tilde : std::nullopt));
        set.p_tilde.push_back(i == j ? 1.0
                                     : fam[i].weight * set.directions[i].norm * set.directions[i].norm / ref_weight);
    }

    const CMatrix qj = p_inv_sqrt * fam[j].matrix() * p_inv_sqrt;
    for (std::size_t i = 0; i < x; ++i) {
        const CMatrix qi = p_inv_sqrt * fam[i].matrix() * p_inv_sqrt;
        const auto &h = set.reflections[i].matrix;
        CMatrix rebuilt = h * qj * adjoint(h);
        rebuilt *= cplx(set.p_tilde[i]);
        const double residual = frobenius_norm(qi - rebuilt);
        set.max_conjugation_residual = std::max(set.max_conjugation_residual, residual);
        if (residual > kConjugationTolerance) {
            throw Error(ErrorCode::CertificationFailed,
                        "Q_i = pt_i Hhat_i Q_j Hhat_i^dagger fails for i = " + std::to_string(i));
        }
    }
    return set;
}

}  // namespace dynatomo
