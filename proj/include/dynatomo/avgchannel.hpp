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

// The time-dependent average channel and what it buys for tomography.
//
// Averaging the depolarizing channel with the d^2 - 1 channels
// rho -> l_k rho + (1 - l_k) M_k rho M_k^dagger gives the Kraus mixture
//
//     Psi_t(rho) = sum_alpha mu_alpha(t) M_alpha rho M_alpha^dagger.
//
// Measuring the single projector |phi><phi| after Psi_t at d^2 instants gives
// p(t_i) = sum_alpha U[i][alpha] tr(rho M_alpha^dagger |phi><phi| M_alpha),
// and inverting U recovers the overlaps of rho with the d^2 states
// |psi_alpha> = M_alpha^dagger |phi>. Whenever the Gram-squared matrix
// A = [|<phi_a|phi_b>|^2] of the orbit is nonsingular these projectors span
// the operator space and rho is determined.
//
// Index convention: the recovered overlaps are ordered by the alpha of the
// measured Kraus term. Because M_alpha^dagger is a phase times M_beta with
// beta = WeylHeisenbergBasis::adjoint_index(alpha), the overlap at alpha is
// tr(rho |phi_beta><phi_beta|) for the forward orbit |phi_beta> = M_beta|phi>.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynatomo/matcore.hpp"
#include "dynatomo/povm.hpp"
#include "dynatomo/rng.hpp"
#include "dynatomo/rud_tomography.hpp"
#include "dynatomo/schedule.hpp"
#include "dynatomo/weyl.hpp"

namespace dynatomo {

/// lambda0 rho0 + (1 - lambda0) / d I.
inline CMatrix depolarize(const CMatrix &rho0, double lambda0, std::size_t d) {
    if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw Error(ErrorCode::LambdaOutOfRange, "lambda0 outside [0, 1]");
    if (rho0.rows() != d || !rho0.is_square()) throw Error(ErrorCode::ShapeMismatch, "rho0 must be d x d");
    CMatrix out = rho0;
    out *= cplx(lambda0);
    out += CMatrix::identity(d) * cplx((1.0 - lambda0) / static_cast<double>(d));
    return out;
}

class AverageChannel {
   public:
    AverageChannel(WeylHeisenbergBasis basis, DecayFamily decay) : basis_(std::move(basis)), decay_(std::move(decay)) {
        if (decay_.size() != basis_.size()) throw Error(ErrorCode::ShapeMismatch, "need d^2 decay functions");
    }

    static AverageChannel with_defaults(std::size_t d) {
        return AverageChannel(WeylHeisenbergBasis(d), DecayFamily::default_for(d));
    }

    std::size_t dimension() const noexcept { return basis_.dimension(); }
    const WeylHeisenbergBasis &basis() const noexcept { return basis_; }
    const DecayFamily &decay() const noexcept { return decay_; }

    RVector weights(double t) const {
        if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "time must be nonnegative");
        return average_channel_weights(decay_.evaluate(t), dimension());
    }

   private:
    WeylHeisenbergBasis basis_;
    DecayFamily decay_;
};

/// Kraus-mixture form sum_alpha mu_alpha(t) M_alpha rho0 M_alpha^dagger.
inline CMatrix average_channel_apply(const AverageChannel &ch, const CMatrix &rho0, double t) {
    const auto mu = ch.weights(t);
    const auto &basis = ch.basis();
    const std::size_t d = ch.dimension();
    if (rho0.rows() != d || !rho0.is_square()) throw Error(ErrorCode::ShapeMismatch, "rho0 must be d x d");
    CMatrix out(d, d);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        CMatrix term = basis[a] * rho0 * adjoint(basis[a]);
        term *= cplx(mu[a]);
        out += term;
    }
    return out;
}

/// Average of the d^2 component channels: the depolarizing channel on
/// alpha = 0 and l_k rho0 + (1 - l_k) M_k rho0 M_k^dagger for k >= 1.
inline CMatrix average_channel_apply_by_components(const AverageChannel &ch, const CMatrix &rho0, double t) {
    if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "time must be nonnegative");
    const auto lambdas = ch.decay().evaluate(t);
    const auto &basis = ch.basis();
    const std::size_t d = ch.dimension();
    CMatrix out = depolarize(rho0, lambdas[0], d);
    for (std::size_t k = 1; k < basis.size(); ++k) {
        CMatrix kept = rho0;
        kept *= cplx(lambdas[k]);
        CMatrix moved = basis[k] * rho0 * adjoint(basis[k]);
        moved *= cplx(1.0 - lambdas[k]);
        out += kept;
        out += moved;
    }
    out *= cplx(1.0 / static_cast<double>(basis.size()));
    return out;
}

/// tr[Psi_t(rho0) |phi><phi|].
inline double probe_probability(const AverageChannel &ch, const CMatrix &rho0, std::span<const cplx> phi, double t) {
    if (std::abs(vector_norm(phi) - 1.0) > kUnitNormTolerance) {
        throw Error(ErrorCode::InvalidArgument, "phi must be a unit vector");
    }
    const CMatrix out = average_channel_apply(ch, rho0, t);
    return clamp_probability(inner(phi, apply<cplx>(out, phi)).real());
}

/// |psi_alpha> = M_alpha^dagger |phi>.
inline std::vector<CVector> adjoint_orbit(const WeylHeisenbergBasis &basis, std::span<const cplx> phi) {
    std::vector<CVector> out;
    out.reserve(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) out.push_back(apply<cplx>(adjoint(basis[a]), phi));
    return out;
}

/// The effects whose overlaps the single-projector scheme recovers,
/// |psi_alpha><psi_alpha| with |psi_alpha> = M_alpha^dagger |phi>.
inline std::vector<CMatrix> single_projector_effects(const WeylHeisenbergBasis &basis, std::span<const cplx> phi) {
    std::vector<CMatrix> out;
    for (const auto &psi : adjoint_orbit(basis, phi)) out.push_back(projector(psi));
    return out;
}

/// sum_alpha mu_alpha(t) tr(rho0 M_alpha^dagger |phi><phi| M_alpha), the
/// term-by-term form of probe_probability.
inline double probe_probability_by_terms(const AverageChannel &ch, const CMatrix &rho0, std::span<const cplx> phi,
                                         double t) {
    const auto mu = ch.weights(t);
    const auto effects = single_projector_effects(ch.basis(), phi);
    double p = 0.0;
    for (std::size_t a = 0; a < effects.size(); ++a) p += mu[a] * frobenius_inner(effects[a], rho0).real();
    return p;
}

struct SingleProjectorRun {
    DesignMatrix design;
    ProbabilityRecord record;
    RVector overlaps;  // tr(rho0 |psi_alpha><psi_alpha|), alpha order
    ReconstructionReport report;
};

/// Solves U^{-1} p for the d^2 overlaps and reconstructs rho0 by least
/// squares over the |psi_alpha><psi_alpha|. `record.values` are the measured
/// (or exact) probe probabilities on `record.grid`.
inline SingleProjectorRun reconstruct_from_probe_record(const AverageChannel &ch, std::span<const cplx> phi,
                                                        ProbabilityRecord record,
                                                        std::optional<CMatrix> truth = std::nullopt) {
    SingleProjectorRun run;
    run.design = build_design_U(ch.decay(), record.grid, ch.dimension());
    run.record = std::move(record);
    run.overlaps = solve_for_q_traces(run.record, run.design);
    run.report = reconstruct_from_effects(run.overlaps, single_projector_effects(ch.basis(), phi), std::move(truth));
    run.report.design_condition = run.design.condition;
    return run;
}

/// Simulates the full measurement of |phi><phi| after Psi_t at each instant
/// (Bernoulli sampled when shots > 0) and reconstructs rho0.
inline SingleProjectorRun reconstruct_via_single_projector(const AverageChannel &ch, const CMatrix &rho0,
                                                           std::span<const cplx> phi, const TimeGrid &grid,
                                                           std::uint64_t shots, std::uint64_t seed) {
    validate_density_matrix(rho0);
    ProbabilityRecord rec;
    rec.grid = grid;
    rec.shots = shots;
    for (double t : grid.instants()) rec.exact.push_back(probe_probability(ch, rho0, phi, t));
    rec.values = sample_frequencies(rec.exact, shots, seed);
    return reconstruct_from_probe_record(ch, phi, std::move(rec), rho0);
}

// ---------------------------------------------------------------------------
// Gram-squared analysis of orbits.

struct GramSquaredMatrix {
    RMatrix matrix;
    double det = 0.0;
};

inline constexpr double kGramDetThreshold = 1e-10;

/// A[j][k] = |<phi_j|phi_k>|^2.
inline GramSquaredMatrix gram_squared(std::span<const CVector> states) {
    const std::size_t n = states.size();
    GramSquaredMatrix out{RMatrix(n, n), 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        out.matrix(j, j) = abs2(inner(states[j], states[j]));
        for (std::size_t k = j + 1; k < n; ++k) out.matrix(j, k) = out.matrix(k, j) = abs2(inner(states[j], states[k]));
    }
    out.det = determinant(out.matrix);
    return out;
}

struct FrameOperatorK {
    CMatrix k;
    CMatrix inv_sqrt;
};

inline FrameOperatorK orbit_frame_operator(std::span<const CVector> states) {
    if (states.empty()) throw Error(ErrorCode::InvalidArgument, "empty orbit");
    FrameOperatorK out{CMatrix(states.front().size(), states.front().size()), {}};
    for (const auto &s : states) out.k += projector(s);
    out.inv_sqrt = inv_sqrt_pd(out.k);
    return out;
}

/// {K^{-1/2}|phi_a><phi_a|K^{-1/2}}; requires |det A| > 1e-10.
inline Povm canonical_orbit_povm(std::span<const CVector> states) {
    const auto gram = gram_squared(states);
    if (!(std::abs(gram.det) > kGramDetThreshold)) {
        throw Error(ErrorCode::NotInformationallyComplete, "Gram-squared matrix is singular");
    }
    const auto frame = orbit_frame_operator(states);
    Povm out{states.front().size(), {}};
    for (const auto &s : states) out.elements.push_back(hermitian_part(frame.inv_sqrt * projector(s) * frame.inv_sqrt));
    return out;
}

struct PerturbedState {
    CVector state;
    double gram_det = 0.0;
    bool informationally_complete = false;  // rank test, independent of gram_det
};

/// Draws `count` states uniformly from the cube of half-width `magnitude`
/// around phi in the real coordinates (Re phi_k, Im phi_k), normalizes them
/// and reports det A and the rank-based IC verdict of each orbit. Trial i uses
/// the seed derived from (seed, i).
inline std::vector<PerturbedState> perturb_family(const WeylHeisenbergBasis &basis, std::span<const cplx> phi,
                                                  std::size_t count, double magnitude, std::uint64_t seed) {
    if (!(magnitude >= 0.0)) throw Error(ErrorCode::InvalidArgument, "magnitude must be nonnegative");
    if (phi.size() != basis.dimension()) throw Error(ErrorCode::ShapeMismatch, "phi must have length d");
    return run_trials(count, seed, [&](std::size_t, std::uint64_t trial_seed) {
        Rng rng(trial_seed);
        CVector v(phi.begin(), phi.end());
        for (auto &x : v) {
            const double da = rng.uniform(-magnitude, magnitude);
            const double db = rng.uniform(-magnitude, magnitude);
            x += cplx(da, db);
        }
        const double n = vector_norm(v);
        for (auto &x : v) x /= n;
        PerturbedState out;
        const auto states = orbit(basis, v);
        out.gram_det = gram_squared(states).det;
        std::vector<CMatrix> projectors;
        for (const auto &s : states) projectors.push_back(projector(s));
        out.informationally_complete = is_ic(projectors).informationally_complete;
        out.state = std::move(v);
        return out;
    });
}

// ---------------------------------------------------------------------------
// SIC simulation.

/// |<phi|M_alpha|phi>|^2 for every alpha.
inline RVector fiducial_overlaps(const WeylHeisenbergBasis &basis, std::span<const cplx> phi) {
    RVector out;
    for (std::size_t a = 0; a < basis.size(); ++a) out.push_back(abs2(inner(phi, basis.apply(a, phi))));
    return out;
}

inline constexpr double kFiducialTolerance = 1e-9;

inline double fiducial_defect(const WeylHeisenbergBasis &basis, std::span<const cplx> phi) {
    const double target = 1.0 / static_cast<double>(basis.dimension() + 1);
    const auto overlaps = fiducial_overlaps(basis, phi);
    double worst = 0.0;
    for (std::size_t a = 1; a < overlaps.size(); ++a) worst = std::max(worst, std::abs(overlaps[a] - target));
    return worst;
}

/// Closed-form Weyl-Heisenberg fiducials for d = 2 and d = 3.
inline CVector builtin_fiducial(std::size_t d) {
    if (d == 2) {
        const double s3 = std::sqrt(3.0);
        const double norm = 1.0 / std::sqrt(6.0);
        const cplx phase = std::polar(1.0, std::numbers::pi / 4.0);
        return {norm * std::sqrt(3.0 + s3), norm * phase * std::sqrt(3.0 - s3)};
    }
    if (d == 3) {
        const double r = 1.0 / std::sqrt(2.0);
        return {0.0, r, -r};
    }
    throw Error(ErrorCode::InvalidArgument, "no built-in fiducial for d = " + std::to_string(d));
}

struct SicSimulation {
    RVector probabilities;  // tr(rho0 E_k), E_k = (1/d)|phi_k><phi_k|, k in forward-orbit order
    SingleProjectorRun run;
};

/// Recovers tr(rho0 M_a^dagger|phi><phi|M_a) from the single-projector scheme
/// and divides by d. Each value is stored at the forward-orbit index
/// adjoint_index(a), giving the SIC probabilities tr(rho0 E_k).
inline SicSimulation simulate_sic(const CMatrix &rho0, std::span<const cplx> fiducial, const AverageChannel &ch,
                                  const TimeGrid &grid, std::uint64_t shots, std::uint64_t seed) {
    const auto &basis = ch.basis();
    if (fiducial.size() != basis.dimension()) throw Error(ErrorCode::ShapeMismatch, "fiducial has wrong length");
    if (std::abs(vector_norm(fiducial) - 1.0) > kFiducialTolerance ||
        fiducial_defect(basis, fiducial) > kFiducialTolerance) {
        throw Error(ErrorCode::NotAFiducial, "state does not satisfy |<phi|M_a|phi>|^2 = 1/(d+1)");
    }
    SicSimulation sim;
    sim.run = reconstruct_via_single_projector(ch, rho0, fiducial, grid, shots, seed);
    const double d = static_cast<double>(basis.dimension());
    sim.probabilities.assign(basis.size(), 0.0);
    for (std::size_t a = 0; a < basis.size(); ++a) sim.probabilities[basis.adjoint_index(a)] = sim.run.overlaps[a] / d;
    return sim;
}

}  // namespace dynatomo
