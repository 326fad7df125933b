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

// The worked qutrit example: nine vectors built from the additive character
// chi(x) = w^x of F_3 (w = e^{2 pi i / 3}) and the polynomial
// f(x) = x^2 - x + 1, each weighted 1/3, with reference outcome 7.
//
//   v1 = (1, w, w^2)      v2 = (1, w^2, w)      v3 = (w, w^2, w^2)
//   v4 = (w, 1, w)        v5 = (w^2, 1, w^2)    v6 = (w^2, w, w)
//   (all over sqrt 3) and v7, v8, v9 the standard basis.
//
// The example's printed frame operator is E = [[1,0,0],[0,1,-1/3],[0,-1/3,1]],
// and its printed directions b_i and quasi-Householder matrices follow from
// applying that E^{-1/2} to the vectors above. The vectors themselves sum to
// [[1,-1/3,0],[-1/3,1,0],[0,0,1]] instead, so both frame operators are kept:
// frame_from_vectors() for the real protocol and frame_closed_form() to
// reproduce the printed matrices.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include "dynatomo/householder.hpp"
#include "dynatomo/matcore.hpp"
#include "dynatomo/povm.hpp"

namespace dynatomo::example48 {

inline constexpr std::size_t kDimension = 3;
inline constexpr std::size_t kCount = 9;
inline constexpr std::size_t kReference = 6;  // outcome 7, zero based
inline constexpr double kWeight = 1.0 / 3.0;

inline cplx w(int power) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(power) / 3.0;
    return {std::cos(angle), std::sin(angle)};
}

inline std::vector<CVector> vectors() {
    const double s = 1.0 / std::sqrt(3.0);
    auto v = [s](int a, int b, int c) { return CVector{s * w(a), s * w(b), s * w(c)}; };
    return {v(0, 1, 2), v(0, 2, 1), v(1, 2, 2), v(1, 0, 1), v(2, 0, 2), v(2, 1, 1),
            CVector{1.0, 0.0, 0.0}, CVector{0.0, 1.0, 0.0}, CVector{0.0, 0.0, 1.0}};
}

inline ProjectorFamily family() {
    std::vector<SubnormalizedProjector> ps;
    for (auto &v : vectors()) ps.push_back({kWeight, std::move(v)});
    return ProjectorFamily(kDimension, std::move(ps));
}

/// eta_3 = eta_4 = e^{i pi / 3}, eta_5 = eta_6 = e^{-i pi / 3}, all others 1.
/// Keyed zero based.
inline std::map<std::size_t, DirectionOverrides> eta_overrides() {
    const cplx up = std::polar(1.0, std::numbers::pi / 3.0);
    std::map<std::size_t, DirectionOverrides> out;
    for (std::size_t i : {0u, 1u, 6u, 7u, 8u}) out[i].eta = cplx(1.0);
    out[2].eta = up;
    out[3].eta = up;
    out[4].eta = std::conj(up);
    out[5].eta = std::conj(up);
    return out;
}

inline CMatrix frame_from_vectors() { return frame_operator(family()); }

inline RMatrix frame_closed_form() { return {{1.0, 0.0, 0.0}, {0.0, 1.0, -1.0 / 3.0}, {0.0, -1.0 / 3.0, 1.0}}; }

inline RMatrix frame_inverse_closed_form() {
    return {{1.0, 0.0, 0.0}, {0.0, 9.0 / 8.0, 3.0 / 8.0}, {0.0, 3.0 / 8.0, 9.0 / 8.0}};
}

/// kappa = sqrt(9 + 6 sqrt 2) / 4 and sigma = sqrt(9 - 6 sqrt 2) / 4.
inline double kappa() { return std::sqrt(9.0 + 6.0 * std::numbers::sqrt2) / 4.0; }
inline double sigma() { return std::sqrt(9.0 - 6.0 * std::numbers::sqrt2) / 4.0; }

inline RMatrix frame_inv_sqrt_closed_form() {
    return {{1.0, 0.0, 0.0}, {0.0, kappa(), sigma()}, {0.0, sigma(), kappa()}};
}

/// The printed four-decimal quasi-Householder matrices Hhat_1..Hhat_9,
/// row major. Hhat_7 is depicted with a particular choice of the reflector
/// orthogonal to b_7, which any unit vector in that plane can replace, so it
/// is compared by its defining properties rather than entrywise.
inline std::array<CMatrix, kCount> printed_householders() {
    using c = cplx;
    std::array<CMatrix, kCount> h;
    h[0] = {{c(0.5898), c(-0.3612, -0.4423), c(-0.3612, 0.4423)},
            {c(-0.3612, 0.4423), c(0.2051), c(0.1590, 0.7788)},
            {c(-0.3612, -0.4423), c(0.1590, -0.7788), c(0.2051)}};
    h[1] = {{c(0.5898), c(-0.3612, 0.4423), c(-0.3612, -0.4423)},
            {c(-0.3612, -0.4423), c(0.2051), c(0.1590, -0.7788)},
            {c(-0.3612, 0.4423), c(0.1590, 0.7788), c(0.2051)}};
    h[2] = {{c(-0.2500, 0.4330), c(0.6124), c(0.6124)},
            {c(-0.3062, -0.5303), c(0.3750, -0.6495), c(-0.1250, 0.2165)},
            {c(-0.3062, -0.5303), c(-0.1250, 0.2165), c(0.3750, -0.6495)}};
    h[3] = {{c(-0.2949, 0.5108), c(-0.3612, -0.4423), c(-0.3612, 0.4423)},
            {c(0.5636, 0.0916), c(0.3974, -0.6884), c(0.1946, 0.0650)},
            {c(-0.2025, 0.5339), c(-0.1535, -0.1360), c(0.3974, -0.6884)}};
    h[4] = {{c(-0.2949, -0.5108), c(-0.3612, 0.4423), c(-0.3612, -0.4423)},
            {c(0.5636, -0.0916), c(0.3974, 0.6884), c(0.1946, -0.0650)},
            {c(-0.2025, -0.5339), c(-0.1535, 0.1360), c(0.3974, 0.6884)}};
    h[5] = {{c(-0.2500, -0.4330), c(0.6124), c(0.6124)},
            {c(-0.3062, 0.5303), c(0.3750, 0.6495), c(-0.1250, -0.2165)},
            {c(-0.3062, 0.5303), c(-0.1250, -0.2165), c(0.3750, 0.6495)}};
    h[6] = {{c(1.0), c(0.0), c(0.0)},
            {c(0.0), c(-0.1111), c(0.5476, -0.8293)},
            {c(0.0), c(0.5476, 0.8293), c(0.1111)}};
    h[7] = {{c(0.0), c(0.9856), c(0.1691)},
            {c(0.9856), c(0.0286), c(-0.1667)},
            {c(0.1691), c(-0.1667), c(0.9714)}};
    h[8] = {{c(0.0), c(0.1691), c(0.9856)},
            {c(0.1691), c(0.9714), c(-0.1667)},
            {c(0.9856), c(-0.1667), c(0.0286)}};
    return h;
}

/// Hhat_i from the printed vectors with P^{-1/2} taken from the printed E.
inline QuasiHouseholderSet displayed_householder_set() {
    return build_set(family(), kReference, inv_sqrt_pd(to_complex(frame_closed_form())), eta_overrides());
}

inline constexpr std::size_t kPropertyCheckedIndex = 6;
inline constexpr double kGoldenTolerance = 5e-4;

}  // namespace dynatomo::example48
