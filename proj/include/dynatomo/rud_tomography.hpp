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

// Single-outcome tomography under random unitary dynamics.
//
// The state evolves as rho(t) = sum_i mu_i(t) H_i rho(0) H_i^dagger with the
// quasi-Householder unitaries H_i. Measuring the single effect Q_j at x
// instants gives Prob(t_i) = sum_k K[i][k] tr(Q_k rho(0)) with
// K[i][k] = mu_k(t_i) / pt_k, so inverting K yields every tr(Q_k rho(0)),
// and the informationally complete POVM {Q_k} pins down rho(0).

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dynatomo/householder.hpp"
#include "dynatomo/matcore.hpp"
#include "dynatomo/povm.hpp"
#include "dynatomo/rng.hpp"
#include "dynatomo/schedule.hpp"

namespace dynatomo {

inline constexpr double kStateTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Throws InvalidState unless rho is Hermitian, PSD and unit-trace within tol.
inline void validate_density_matrix(const CMatrix &rho, double tol = kStateTolerance) {
    if (!rho.is_square() || rho.rows() == 0) throw Error(ErrorCode::InvalidState, "state must be square");
    if (!all_finite(rho)) throw Error(ErrorCode::InvalidState, "state has non-finite entries");
    if (hermiticity_defect(rho) > tol) throw Error(ErrorCode::InvalidState, "state is not Hermitian");
    if (std::abs(trace(rho) - cplx(1.0)) > tol) throw Error(ErrorCode::InvalidState, "state trace is not 1");
    if (hermitian_eigen(rho).eigenvalues.front() < -tol) {
        throw Error(ErrorCode::InvalidState, "state has a negative eigenvalue");
    }
}

inline double unitarity_defect(const CMatrix &u) {
    return frobenius_norm(adjoint(u) * u - CMatrix::identity(u.rows()));
}

class RudEvolution {
   public:
    RudEvolution(std::vector<CMatrix> unitaries, ExpDecaySchedule schedule)
        : unitaries_(std::move(unitaries)), schedule_(std::move(schedule)) {
        if (unitaries_.size() != schedule_.count()) {
            throw Error(ErrorCode::ShapeMismatch, "need one unitary per schedule outcome");
        }
        for (std::size_t i = 0; i < unitaries_.size(); ++i) {
            if (!unitaries_[i].is_square() || unitaries_[i].rows() != unitaries_.front().rows()) {
                throw Error(ErrorCode::ShapeMismatch, "unitaries must share one square shape");
            }
            if (unitarity_defect(unitaries_[i]) > kUnitaryTolerance) {
                throw Error(ErrorCode::InvariantError, "H_" + std::to_string(i) + " is not unitary");
            }
        }
    }

    std::size_t dimension() const { return unitaries_.front().rows(); }
    const std::vector<CMatrix> &unitaries() const noexcept { return unitaries_; }
    const ExpDecaySchedule &schedule() const noexcept { return schedule_; }

    /// sum_i mu_i(t) H_i rho0 H_i^dagger.
    CMatrix evolve(const CMatrix &rho0, double t) const {
        if (rho0.rows() != dimension() || !rho0.is_square()) {
            throw Error(ErrorCode::ShapeMismatch, "state dimension does not match the dynamics");
        }
        const auto mu = schedule_.mu(t);
        CMatrix out(dimension(), dimension());
        for (std::size_t i = 0; i < unitaries_.size(); ++i) {
            if (mu[i] == 0.0) continue;
            CMatrix term = unitaries_[i] * rho0 * adjoint(unitaries_[i]);
            term *= cplx(mu[i]);
            out += term;
        }
        return hermitian_part(out);
    }

   private:
    std::vector<CMatrix> unitaries_;
    ExpDecaySchedule schedule_;
};

struct ProbabilityRecord {
    TimeGrid grid{std::vector<double>{}};
    std::size_t outcome_index = 0;
    RVector exact;
    RVector values;  // sampled frequencies when shots > 0, else equal to exact
    std::uint64_t shots = 0;
};

inline void validate_effect(const CMatrix &effect, std::size_t d) {
    if (effect.rows() != d || !effect.is_square()) throw Error(ErrorCode::InvalidEffect, "effect has wrong shape");
    if (hermiticity_defect(effect) > kStateTolerance) throw Error(ErrorCode::InvalidEffect, "effect not Hermitian");
    const auto ev = hermitian_eigen(effect).eigenvalues;
    if (ev.front() < -kStateTolerance || ev.back() > 1.0 + kStateTolerance) {
        throw Error(ErrorCode::InvalidEffect, "effect eigenvalues outside [0, 1]");
    }
}

inline double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

/// Replaces each probability by successes / shots, drawing instant i from
/// stream i of `seed`. shots == 0 returns the values unchanged.
inline RVector sample_frequencies(std::span<const double> exact, std::uint64_t shots, std::uint64_t seed) {
    RVector out(exact.begin(), exact.end());
    if (shots == 0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        Rng rng(seed, i);
        out[i] = static_cast<double>(rng.count_successes(shots, exact[i])) / static_cast<double>(shots);
    }
    return out;
}

/// Born-rule probabilities tr(Q_j rho(t_i)) for each instant of the grid.
inline ProbabilityRecord born_probabilities(const RudEvolution &ev, const CMatrix &rho0, const CMatrix &q_j,
                                            const TimeGrid &grid, std::uint64_t shots, std::uint64_t seed,
                                            std::size_t outcome_index = 0) {
    validate_effect(q_j, ev.dimension());
    ProbabilityRecord rec;
    rec.grid = grid;
    rec.outcome_index = outcome_index;
    rec.shots = shots;
    rec.exact.reserve(grid.size());
    for (double t : grid.instants()) {
        rec.exact.push_back(clamp_probability(frobenius_inner(q_j, ev.evolve(rho0, t)).real()));
    }
    rec.values = sample_frequencies(rec.exact, shots, seed);
    return rec;
}

/// K^{-1} Prob = {tr(Q_i rho(0))}.
inline RVector solve_for_q_traces(const ProbabilityRecord &record, const DesignMatrix &k) {
    if (record.values.size() != k.matrix.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "probability record and design matrix differ in size");
    }
    try {
        return solve_linear(k.matrix, record.values);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::Singular) throw Error(ErrorCode::SingularDesign, e.what());
        throw;
    }
}

struct ReconstructionReport {
    CMatrix recovered_rho;
    CMatrix raw_solution;
    std::optional<double> frobenius_error_vs_truth;
    double trace_deviation = 0.0;  // |tr(raw) - 1|
    double min_eigenvalue = 0.0;   // of the Hermitian part of raw
    double design_condition = 0.0;
};

/// Clips negative eigenvalues of the Hermitian part and renormalizes the
/// trace to one.
inline CMatrix project_to_density(const CMatrix &a) {
    const auto eig = hermitian_eigen(hermitian_part(a), INFINITY);
    double total = 0.0;
    for (double x : eig.eigenvalues) total += std::max(x, 0.0);
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidState, "no positive spectrum left after clipping");
    return hermitian_part(spectral_function(eig, [total](double x) { return std::max(x, 0.0) / total; }));
}

/// Least-squares solution of tr(E_i rho) = v_i over all d x d matrices rho,
/// followed by projection onto the density matrices.
inline ReconstructionReport reconstruct_from_effects(std::span<const double> v, std::span<const CMatrix> effects,
                                                     std::optional<CMatrix> truth = std::nullopt) {
    if (v.size() != effects.size()) throw Error(ErrorCode::ShapeMismatch, "one value per effect required");
    if (!is_ic(effects).informationally_complete) {
        throw Error(ErrorCode::NotInformationallyComplete, "effects do not span the operator space");
    }
    const std::size_t d = effects.front().rows();
    CMatrix a(effects.size(), d * d);
    for (std::size_t i = 0; i < effects.size(); ++i)
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) a(i, r * d + c) = effects[i](c, r);  // tr(E rho) = sum E(c,r) rho(r,c)
    const CVector rhs(v.begin(), v.end());
    const CVector x = lstsq_via_normal_equations(a, rhs);

    ReconstructionReport out;
    out.raw_solution = CMatrix(d, d, x);
    out.trace_deviation = std::abs(trace(out.raw_solution) - cplx(1.0));
    out.min_eigenvalue = hermitian_eigen(hermitian_part(out.raw_solution), INFINITY).eigenvalues.front();
    out.recovered_rho = project_to_density(out.raw_solution);
    if (truth) out.frobenius_error_vs_truth = frobenius_norm(out.recovered_rho - *truth);
    return out;
}

inline ReconstructionReport reconstruct_state(std::span<const double> v, const Povm &povm,
                                              std::optional<CMatrix> truth = std::nullopt) {
    return reconstruct_from_effects(v, povm.elements, std::move(truth));
}

// ---------------------------------------------------------------------------
// End-to-end protocol.

struct RudProtocolConfig {
    ProjectorFamily family;
    std::size_t outcome_index = 0;  // j, zero based
    std::optional<ExpDecaySchedule> schedule;
    std::optional<TimeGrid> grid;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::map<std::size_t, DirectionOverrides> overrides;
    CMatrix rho0;
};

struct RudRun {
    CMatrix frame;
    RVector frame_eigenvalues;
    Povm povm;
    QuasiHouseholderSet householders;
    ExpDecaySchedule schedule{std::vector<double>{}};
    DesignMatrix design;
    ProbabilityRecord record;
    RVector q_traces;
    ReconstructionReport report;
};

inline RudRun run_protocol(const RudProtocolConfig &cfg) {
    const auto &fam = cfg.family;
    const std::size_t d = fam.dimension();
    if (fam.size() < d * d) {
        throw Error(ErrorCode::InvariantError, "tomography needs x >= d^2 projectors");
    }
    if (cfg.outcome_index >= fam.size()) throw Error(ErrorCode::InvalidArgument, "outcome index out of range");
    validate_density_matrix(cfg.rho0);

    RudRun run;
    run.frame = frame_operator(fam);
    run.frame_eigenvalues = assert_positive_definite(run.frame);
    run.povm = canonical_ic_povm(fam);
    const CMatrix r = inv_sqrt_pd(run.frame);
    run.householders = build_set(fam, cfg.outcome_index, r, cfg.overrides);

    run.schedule = cfg.schedule ? *cfg.schedule : ExpDecaySchedule::with_defaults(fam.size());
    if (run.schedule.count() != fam.size()) {
        throw Error(ErrorCode::InvariantError, "schedule must have exactly one outcome per projector");
    }
    const TimeGrid grid = cfg.grid ? *cfg.grid : TimeGrid::matched_to(run.schedule);
    run.design = build_design_K(run.schedule, grid, run.householders.p_tilde);

    const RudEvolution ev(run.householders.dynamics(), run.schedule);
    run.record = born_probabilities(ev, cfg.rho0, run.povm.elements[cfg.outcome_index], grid, cfg.shots, cfg.seed,
                                    cfg.outcome_index);
    run.q_traces = solve_for_q_traces(run.record, run.design);
    run.report = reconstruct_state(run.q_traces, run.povm, cfg.rho0);
    run.report.design_condition = run.design.condition;
    return run;
}

/// Runs fn(trial, seed) for trial = 0..count-1 on up to `threads` workers.
/// Seeds are derived from the master seed by trial index, so the result
/// vector does not depend on the thread count or scheduling.
template <typename Fn>
auto run_trials(std::size_t count, std::uint64_t master_seed, Fn fn, unsigned threads = 1) {
    using Result = decltype(fn(std::size_t{}, std::uint64_t{}));
    std::vector<std::optional<Result>> slots(count);
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i, Rng::derive_seed(master_seed, i)));
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto &f : failures)
        if (f) std::rethrow_exception(f);
    std::vector<Result> out;
    out.reserve(count);
    for (auto &s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace dynatomo
