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

// POVMs built from families of weighted rank-1 projectors p_i |a_i><a_i|.
//
// The frame operator P = sum_i p_i |a_i><a_i| is positive definite exactly
// when the directions span C^d; the canonical POVM is then
// Q_i = P^{-1/2} P_i P^{-1/2}, which sums to the identity and spans the same
// operator space as the raw family.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynatomo/matcore.hpp"

namespace dynatomo {

struct SubnormalizedProjector {
    double weight = 0.0;
    CVector direction;

    CMatrix matrix() const {
        CMatrix m = projector(direction);
        m *= cplx(weight);
        return m;
    }
};

inline constexpr double kUnitNormTolerance = 1e-12;

class ProjectorFamily {
   public:
    ProjectorFamily(std::size_t dimension, std::vector<SubnormalizedProjector> projectors)
        : dimension_(dimension), projectors_(std::move(projectors)) {
        if (dimension_ == 0) throw Error(ErrorCode::DimensionTooSmall, "dimension must be positive");
        if (projectors_.empty()) throw Error(ErrorCode::InvalidArgument, "projector family is empty");
        for (std::size_t i = 0; i < projectors_.size(); ++i) {
            const auto &p = projectors_[i];
            const std::string where = "projector " + std::to_string(i);
            if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
                throw Error(ErrorCode::InvalidArgument, where + " has non-positive weight");
            }
            if (p.direction.size() != dimension_) {
                throw Error(ErrorCode::ShapeMismatch, where + " has the wrong length");
            }
            if (std::abs(vector_norm(p.direction) - 1.0) > kUnitNormTolerance) {
                throw Error(ErrorCode::InvalidArgument, where + " direction is not a unit vector");
            }
        }
    }

    /// Normalizes each direction before validation.
    static ProjectorFamily from_unnormalized(std::size_t dimension,
                                             std::vector<std::pair<double, CVector>> entries) {
        std::vector<SubnormalizedProjector> out;
        out.reserve(entries.size());
        for (auto &[w, v] : entries) {
            const double n = vector_norm(v);
            if (n <= 0.0) throw Error(ErrorCode::ZeroVector, "projector direction is zero");
            for (auto &x : v) x /= n;
            out.push_back({w, std::move(v)});
        }
        return ProjectorFamily(dimension, std::move(out));
    }

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return projectors_.size(); }
    const SubnormalizedProjector &operator[](std::size_t i) const { return projectors_.at(i); }
    const std::vector<SubnormalizedProjector> &projectors() const noexcept { return projectors_; }

    std::vector<CMatrix> matrices() const {
        std::vector<CMatrix> out;
        out.reserve(projectors_.size());
        for (const auto &p : projectors_) out.push_back(p.matrix());
        return out;
    }

    ProjectorFamily scaled(double c) const {
        auto copy = projectors_;
        for (auto &p : copy) p.weight *= c;
        return ProjectorFamily(dimension_, std::move(copy));
    }

   private:
    std::size_t dimension_;
    std::vector<SubnormalizedProjector> projectors_;
};

struct Povm {
    std::size_t dimension = 0;
    std::vector<CMatrix> elements;
};

inline constexpr double kPovmTolerance = 1e-10;

/// Throws InvariantError when an element is not Hermitian PSD or the
/// elements do not resolve the identity.
inline void validate_povm(const Povm &povm, double tol = kPovmTolerance) {
    CMatrix sum(povm.dimension, povm.dimension);
    for (std::size_t i = 0; i < povm.elements.size(); ++i) {
        const auto &e = povm.elements[i];
        if (e.rows() != povm.dimension || !e.is_square()) {
            throw Error(ErrorCode::ShapeMismatch, "POVM element " + std::to_string(i) + " has wrong shape");
        }
        if (hermiticity_defect(e) > tol) {
            throw Error(ErrorCode::InvariantError, "POVM element " + std::to_string(i) + " is not Hermitian");
        }
        if (hermitian_eigen(e).eigenvalues.front() < -tol) {
            throw Error(ErrorCode::InvariantError, "POVM element " + std::to_string(i) + " is not PSD");
        }
        sum += e;
    }
    if (frobenius_norm(sum - CMatrix::identity(povm.dimension)) > tol) {
        throw Error(ErrorCode::InvariantError, "POVM elements do not sum to the identity");
    }
}

inline CMatrix frame_operator(const ProjectorFamily &fam) {
    CMatrix p(fam.dimension(), fam.dimension());
    for (const auto &proj : fam.projectors()) p += proj.matrix();
    return p;
}

/// Eigenvalues of P (ascending). Fails with NotPositiveDefinite unless
/// min eigenvalue > 1e-12 * max eigenvalue, i.e. the directions span C^d.
inline RVector assert_positive_definite(const CMatrix &p) {
    auto eig = hermitian_eigen(p);
    const double top = eig.eigenvalues.back();
    if (!(top > 0.0) || !(eig.eigenvalues.front() > kPositiveDefiniteFloor * top)) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "frame operator is not positive definite (directions do not span C^d)");
    }
    return eig.eigenvalues;
}

inline Povm canonical_ic_povm(const ProjectorFamily &fam) {
    const CMatrix p = frame_operator(fam);
    assert_positive_definite(p);
    const CMatrix r = inv_sqrt_pd(p);
    Povm out{fam.dimension(), {}};
    out.elements.reserve(fam.size());
    for (const auto &proj : fam.projectors()) {
        out.elements.push_back(hermitian_part(r * proj.matrix() * r));
    }
    return out;
}

struct IcReport {
    bool informationally_complete = false;
    std::size_t rank = 0;
    std::size_t required_rank = 0;
    RVector singular_values;
};

inline constexpr double kIcRankTolerance = 1e-10;

/// Numerical rank of the x by d^2 matrix whose rows are vec(E_i).
inline IcReport is_ic(std::span<const CMatrix> elements, double tol = kIcRankTolerance) {
    if (elements.empty()) return {};
    const std::size_t d = elements.front().rows();
    CMatrix stacked(elements.size(), d * d);
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto &e = elements[i];
        if (e.rows() != d || e.cols() != d) throw Error(ErrorCode::ShapeMismatch, "elements differ in shape");
        for (std::size_t k = 0; k < d * d; ++k) stacked(i, k) = e.data()[k];
    }
    IcReport report;
    report.required_rank = d * d;
    report.singular_values = singular_values(stacked);
    const double top = report.singular_values.empty() ? 0.0 : report.singular_values.front();
    for (double s : report.singular_values)
        if (top > 0.0 && s > tol * top) ++report.rank;
    report.informationally_complete = report.rank == report.required_rank;
    return report;
}

struct SicReport {
    double max_pairwise_deviation = 0.0;
    double completeness_defect = 0.0;
    bool is_sic = false;
};

inline constexpr double kSicTolerance = 1e-9;

/// Checks |<u_i|u_j>|^2 = 1/(d+1) for i != j and sum_i (1/d)|u_i><u_i| = I.
inline SicReport sic_check(std::span<const CVector> states) {
    if (states.empty()) throw Error(ErrorCode::InvalidArgument, "no states supplied");
    const std::size_t d = states.front().size();
    if (states.size() != d * d) {
        throw Error(ErrorCode::InvalidArgument,
                    "expected " + std::to_string(d * d) + " states, got " + std::to_string(states.size()));
    }
    const double target = 1.0 / static_cast<double>(d + 1);
    SicReport report;
    CMatrix sum(d, d);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != d) throw Error(ErrorCode::ShapeMismatch, "states differ in length");
        sum += projector(states[i]);
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const double overlap = abs2(inner(states[i], states[j]));
            report.max_pairwise_deviation = std::max(report.max_pairwise_deviation, std::abs(overlap - target));
        }
    }
    sum *= cplx(1.0 / static_cast<double>(d));
    report.completeness_defect = frobenius_norm(sum - CMatrix::identity(d));
    report.is_sic = report.max_pairwise_deviation <= kSicTolerance && report.completeness_defect <= kSicTolerance;
    return report;
}

/// Seeded family of `count` Gaussian unit directions with weights in
/// [0.2, 2). Spans C^d with probability one when count >= d.
inline ProjectorFamily random_projector_family(std::size_t d, std::size_t count, std::uint64_t seed) {
    Rng rng(seed, 0xfa11);
    std::vector<SubnormalizedProjector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double w = rng.uniform(0.2, 2.0);
        out.push_back({w, random_unit_vector(d, rng)});
    }
    return ProjectorFamily(d, std::move(out));
}

}  // namespace dynatomo
