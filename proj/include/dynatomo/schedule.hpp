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

// Time-continuous probability distributions and the square design matrices
// that relate time-series probabilities to trace functionals of the state.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynatomo/matcore.hpp"

namespace dynatomo {

inline constexpr double kDistinctGap = 1e-9;

/// mu_i(t) = (1 - e^{-theta_i t}) / x for i < x, and
/// mu_x(t) = (1 + sum_s e^{-theta_s t}) / x.
class ExpDecaySchedule {
   public:
    explicit ExpDecaySchedule(std::vector<double> thetas) : thetas_(std::move(thetas)) {
        for (std::size_t i = 0; i < thetas_.size(); ++i) {
            if (!(thetas_[i] > 0.0) || !std::isfinite(thetas_[i])) {
                throw Error(ErrorCode::InvalidArgument, "theta " + std::to_string(i) + " must be positive");
            }
        }
        auto sorted = thetas_;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            if (sorted[i] - sorted[i - 1] < kDistinctGap) {
                throw Error(ErrorCode::InvalidArgument, "decay parameters must be pairwise distinct");
            }
        }
    }

    /// theta_i = 4^{i-1}, i = 1..count-1. Geometric spacing keeps the design
    /// matrix condition number in the hundreds up to count = 25.
    static ExpDecaySchedule with_defaults(std::size_t count) {
        if (count == 0) throw Error(ErrorCode::InvalidArgument, "schedule needs at least one outcome");
        std::vector<double> thetas(count - 1);
        for (std::size_t i = 0; i < thetas.size(); ++i) thetas[i] = std::pow(4.0, static_cast<double>(i));
        return ExpDecaySchedule(std::move(thetas));
    }

    std::size_t count() const noexcept { return thetas_.size() + 1; }
    const std::vector<double> &thetas() const noexcept { return thetas_; }

    RVector mu(double t) const {
        if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "time must be nonnegative");
        const double x = static_cast<double>(count());
        RVector out(count());
        double tail = 1.0;
        for (std::size_t i = 0; i < thetas_.size(); ++i) {
            const double e = std::exp(-thetas_[i] * t);
            out[i] = (1.0 - e) / x;
            tail += e;
        }
        out.back() = tail / x;
        return out;
    }

   private:
    std::vector<double> thetas_;
};

class TimeGrid {
   public:
    explicit TimeGrid(std::vector<double> instants) : instants_(std::move(instants)) {
        for (std::size_t i = 0; i < instants_.size(); ++i) {
            if (!(instants_[i] >= 0.0) || !std::isfinite(instants_[i])) {
                throw Error(ErrorCode::NegativeTime, "instant " + std::to_string(i) + " must be nonnegative");
            }
            if (i > 0 && !(instants_[i] > instants_[i - 1])) {
                throw Error(ErrorCode::InvalidArgument, "instants must be strictly increasing");
            }
        }
    }

    static TimeGrid uniform(std::size_t count, double start, double step) {
        std::vector<double> t(count);
        for (std::size_t i = 0; i < count; ++i) t[i] = start + step * static_cast<double>(i);
        return TimeGrid(std::move(t));
    }

    /// {0} together with 2/theta_i, in increasing order.
    static TimeGrid matched_to(const ExpDecaySchedule &sched) {
        std::vector<double> t{0.0};
        for (double theta : sched.thetas()) t.push_back(2.0 / theta);
        std::sort(t.begin(), t.end());
        return TimeGrid(std::move(t));
    }

    std::size_t size() const noexcept { return instants_.size(); }
    double operator[](std::size_t i) const { return instants_.at(i); }
    const std::vector<double> &instants() const noexcept { return instants_; }

   private:
    std::vector<double> instants_;
};

struct DesignMatrix {
    RMatrix matrix;
    double det = 0.0;
    double condition = 0.0;  // sigma_max / sigma_min
};

inline constexpr double kSingularDesignRcond = 1e-12;

/// Reports det and condition; throws SingularDesign when
/// sigma_min <= 1e-12 * sigma_max.
inline DesignMatrix certify_design(RMatrix m) {
    const auto sv = singular_values(m);
    DesignMatrix out;
    out.det = determinant(m);
    out.condition = sv.back() > 0.0 ? sv.front() / sv.back() : INFINITY;
    if (!(sv.back() > kSingularDesignRcond * sv.front())) {
        throw Error(ErrorCode::SingularDesign, "design matrix is numerically singular (condition " +
                                                   std::to_string(out.condition) + ")");
    }
    out.matrix = std::move(m);
    return out;
}

/// K[i][j] = mu_j(t_i) / pt_j.
inline DesignMatrix build_design_K(const ExpDecaySchedule &sched, const TimeGrid &grid,
                                   std::span<const double> p_tilde) {
    const std::size_t x = sched.count();
    if (grid.size() != x || p_tilde.size() != x) {
        throw Error(ErrorCode::ShapeMismatch, "grid, weights and schedule must all have length x");
    }
    RMatrix k(x, x);
    for (std::size_t i = 0; i < x; ++i) {
        const auto mu = sched.mu(grid[i]);
        for (std::size_t j = 0; j < x; ++j) {
            if (!(p_tilde[j] > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
            k(i, j) = mu[j] / p_tilde[j];
        }
    }
    return certify_design(std::move(k));
}

/// The d^2 decay functions lambda_alpha(t) of the average channel, each with
/// range in [0, 1].
class DecayFamily {
   public:
    using Function = std::function<double(double)>;

    explicit DecayFamily(std::vector<Function> fns) : fns_(std::move(fns)) {}

    /// lambda_alpha(t) = e^{-gamma_alpha t}.
    static DecayFamily exponential(std::vector<double> gammas) {
        std::vector<Function> fns;
        for (std::size_t a = 0; a < gammas.size(); ++a) {
            const double g = gammas[a];
            if (!(g >= 0.0) || !std::isfinite(g)) {
                throw Error(ErrorCode::InvalidArgument, "gamma " + std::to_string(a) + " must be nonnegative");
            }
            fns.emplace_back([g](double t) { return std::exp(-g * t); });
        }
        DecayFamily out(std::move(fns));
        out.gammas_ = std::move(gammas);
        return out;
    }

    /// gamma_alpha = 16^alpha. Widely separated rates make U close to
    /// triangular on the default grid, so shot noise is amplified little.
    static DecayFamily default_for(std::size_t d) {
        std::vector<double> gammas(d * d);
        for (std::size_t a = 0; a < gammas.size(); ++a) gammas[a] = std::pow(16.0, static_cast<double>(a));
        return exponential(std::move(gammas));
    }

    static DecayFamily constant(std::size_t count, double value) {
        return DecayFamily(std::vector<Function>(count, [value](double) { return value; }));
    }

    std::size_t size() const noexcept { return fns_.size(); }
    const std::vector<double> &gammas() const noexcept { return gammas_; }

    RVector evaluate(double t) const {
        RVector out(fns_.size());
        for (std::size_t a = 0; a < fns_.size(); ++a) {
            out[a] = fns_[a](t);
            if (!(out[a] >= 0.0 && out[a] <= 1.0)) {
                throw Error(ErrorCode::LambdaOutOfRange,
                            "lambda_" + std::to_string(a) + "(" + std::to_string(t) + ") outside [0, 1]");
            }
        }
        return out;
    }

   private:
    std::vector<Function> fns_;
    std::vector<double> gammas_;
};

/// Mixture weights of the average channel:
///   mu_0 = (1 - l_0 + d^2 sum_k l_k) / d^4,
///   mu_a = (1 - l_0 + d^2 (1 - l_a)) / d^4 for a >= 1.
inline RVector average_channel_weights(std::span<const double> lambdas, std::size_t d) {
    const std::size_t n = d * d;
    if (lambdas.size() != n) throw Error(ErrorCode::ShapeMismatch, "need d^2 decay values");
    for (double l : lambdas) {
        if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorCode::LambdaOutOfRange, "decay value outside [0, 1]");
    }
    const double dd = static_cast<double>(n);
    const double d4 = dd * dd;
    double total = 0.0;
    for (double l : lambdas) total += l;
    RVector mu(n);
    mu[0] = (1.0 - lambdas[0] + dd * total) / d4;
    for (std::size_t a = 1; a < n; ++a) mu[a] = (1.0 - lambdas[0] + dd * (1.0 - lambdas[a])) / d4;
    return mu;
}

/// {1/(4 gamma_alpha)} in increasing order.
inline TimeGrid default_channel_grid(const DecayFamily &family) {
    std::vector<double> t;
    for (double g : family.gammas()) {
        if (!(g > 0.0)) throw Error(ErrorCode::InvalidArgument, "default grid needs positive rates");
        t.push_back(0.25 / g);
    }
    std::sort(t.begin(), t.end());
    return TimeGrid(std::move(t));
}

/// U[i][alpha] = mu_alpha(t_i).
inline DesignMatrix build_design_U(const DecayFamily &family, const TimeGrid &grid, std::size_t d) {
    const std::size_t n = d * d;
    if (family.size() != n || grid.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "need d^2 decay functions and d^2 instants");
    }
    RMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto mu = average_channel_weights(family.evaluate(grid[i]), d);
        for (std::size_t a = 0; a < n; ++a) u(i, a) = mu[a];
    }
    return certify_design(std::move(u));
}

}  // namespace dynatomo
