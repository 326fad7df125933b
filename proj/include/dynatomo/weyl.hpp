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

// Weyl-Heisenberg operators M_{jd+k} = X^j Z^k with
//   X = sum_t |t+1><t|,  Z = sum_t w^t |t><t|,  w = e^{2 pi i / d},
// so that (X^j Z^k)|t> = w^{tk} |t+j>.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynatomo/matcore.hpp"

namespace dynatomo {

/// w^m for w = e^{2 pi i / d}. The exponent is reduced mod d first so the
/// phase is always one of d exactly-computed angles.
inline cplx root_of_unity(std::size_t d, long long m) {
    const auto dd = static_cast<long long>(d);
    const long long r = ((m % dd) + dd) % dd;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
    return {std::cos(angle), std::sin(angle)};
}

inline constexpr double kWeylTolerance = 1e-12;

class WeylHeisenbergBasis {
   public:
    explicit WeylHeisenbergBasis(std::size_t d) : d_(d) {
        if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "Weyl-Heisenberg basis needs d >= 2");
        operators_.reserve(d * d);
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) operators_.push_back(displacement(j, k));
        certify();
    }

    std::size_t dimension() const noexcept { return d_; }
    std::size_t size() const noexcept { return operators_.size(); }
    cplx omega() const { return root_of_unity(d_, 1); }

    const CMatrix &operator[](std::size_t alpha) const { return operators_.at(alpha); }
    const std::vector<CMatrix> &operators() const noexcept { return operators_; }

    std::size_t index(std::size_t j, std::size_t k) const { return j * d_ + k; }
    std::pair<std::size_t, std::size_t> exponents(std::size_t alpha) const { return {alpha / d_, alpha % d_}; }

    CMatrix shift_power(std::size_t j) const { return displacement(j % d_, 0); }
    CMatrix clock_power(std::size_t k) const { return displacement(0, k % d_); }

    /// M_alpha |v> without forming the matrix.
    CVector apply(std::size_t alpha, std::span<const cplx> v) const {
        const auto [j, k] = exponents(alpha);
        CVector out(d_);
        for (std::size_t t = 0; t < d_; ++t)
            out[(t + j) % d_] = root_of_unity(d_, static_cast<long long>(t * k)) * v[t];
        return out;
    }

    /// beta with M_alpha^dagger = phase * M_beta, i.e. (-j mod d, -k mod d).
    std::size_t adjoint_index(std::size_t alpha) const {
        const auto [j, k] = exponents(alpha);
        return index((d_ - j) % d_, (d_ - k) % d_);
    }

   private:
    CMatrix displacement(std::size_t j, std::size_t k) const {
        CMatrix m(d_, d_);
        for (std::size_t t = 0; t < d_; ++t)
            m((t + j) % d_, t) = root_of_unity(d_, static_cast<long long>(t * k));
        return m;
    }

    void certify() const {
        const double dd = static_cast<double>(d_);
        if (frobenius_norm(operators_[0] - CMatrix::identity(d_)) > kWeylTolerance) {
            throw Error(ErrorCode::InvariantError, "M_0 is not the identity");
        }
        for (std::size_t a = 0; a < operators_.size(); ++a) {
            if (a != 0 && std::abs(trace(operators_[a])) > kWeylTolerance) {
                throw Error(ErrorCode::InvariantError, "M_" + std::to_string(a) + " is not traceless");
            }
            for (std::size_t b = a; b < operators_.size(); ++b) {
                const cplx g = frobenius_inner(operators_[a], operators_[b]);
                const cplx expected = a == b ? cplx(dd) : cplx{};
                if (std::abs(g - expected) > kWeylTolerance) {
                    throw Error(ErrorCode::InvariantError, "trace orthogonality fails for (" + std::to_string(a) +
                                                               ", " + std::to_string(b) + ")");
                }
            }
        }
    }

    std::size_t d_;
    std::vector<CMatrix> operators_;
};

inline WeylHeisenbergBasis build_basis(std::size_t d) { return WeylHeisenbergBasis(d); }

/// The scalar c with X^j Z^k = c Z^k X^j, read off entrywise. Throws
/// InvariantError if the two products are not proportional.
inline cplx commutation_check(const WeylHeisenbergBasis &basis, std::size_t j, std::size_t k) {
    const std::size_t d = basis.dimension();
    if (j >= d || k >= d) throw Error(ErrorCode::InvalidArgument, "exponents must lie in [0, d)");
    const CMatrix xz = basis.shift_power(j) * basis.clock_power(k);
    const CMatrix zx = basis.clock_power(k) * basis.shift_power(j);
    std::size_t pivot = 0;
    for (std::size_t n = 0; n < zx.data().size(); ++n)
        if (std::abs(zx.data()[n]) > std::abs(zx.data()[pivot])) pivot = n;
    const cplx c = xz.data()[pivot] / zx.data()[pivot];
    if (frobenius_norm(xz - c * zx) > kWeylTolerance) {
        throw Error(ErrorCode::InvariantError, "X^j Z^k is not proportional to Z^k X^j");
    }
    return c;
}

/// sum_alpha M_alpha rho M_alpha^dagger, which equals d tr(rho) I.
inline CMatrix twirl(const WeylHeisenbergBasis &basis, const CMatrix &rho) {
    const std::size_t d = basis.dimension();
    if (rho.rows() != d || rho.cols() != d) throw Error(ErrorCode::ShapeMismatch, "rho must be d x d");
    CMatrix out(d, d);
    for (const auto &m : basis.operators()) out += m * rho * adjoint(m);
    return out;
}

/// Coefficients c_alpha = tr(M_alpha^dagger rho).
inline CVector wh_expand(const WeylHeisenbergBasis &basis, const CMatrix &rho) {
    const std::size_t d = basis.dimension();
    if (rho.rows() != d || rho.cols() != d) throw Error(ErrorCode::ShapeMismatch, "rho must be d x d");
    CVector out;
    out.reserve(basis.size());
    for (const auto &m : basis.operators()) out.push_back(frobenius_inner(m, rho));
    return out;
}

/// (1/d) sum_alpha c_alpha M_alpha.
inline CMatrix wh_reassemble(const WeylHeisenbergBasis &basis, std::span<const cplx> coefficients) {
    if (coefficients.size() != basis.size()) throw Error(ErrorCode::ShapeMismatch, "need d^2 coefficients");
    const std::size_t d = basis.dimension();
    CMatrix out(d, d);
    for (std::size_t a = 0; a < basis.size(); ++a) out += coefficients[a] * basis[a];
    out *= cplx(1.0 / static_cast<double>(d));
    return out;
}

/// |phi_alpha> = M_alpha |phi>, alpha = 0..d^2-1.
inline std::vector<CVector> orbit(const WeylHeisenbergBasis &basis, std::span<const cplx> phi) {
    if (phi.size() != basis.dimension()) throw Error(ErrorCode::ShapeMismatch, "phi must have length d");
    if (std::abs(vector_norm(phi) - 1.0) > kWeylTolerance) {
        throw Error(ErrorCode::InvalidArgument, "phi must be a unit vector");
    }
    std::vector<CVector> out;
    out.reserve(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) out.push_back(basis.apply(a, phi));
    return out;
}

}  // namespace dynatomo
