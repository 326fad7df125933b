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

// Subcommand implementations. Each command turns a validated configuration
// into a CommandResult: a JSON report, an optional probability table and the
// exit status the command line should return when the computation itself
// succeeded but a check did not (not IC, golden mismatch).

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynatomo/avgchannel.hpp"
#include "dynatomo/cli/config.hpp"
#include "dynatomo/cli/json_io.hpp"
#include "dynatomo/example48.hpp"
#include "dynatomo/householder.hpp"
#include "dynatomo/povm.hpp"
#include "dynatomo/rud_tomography.hpp"
#include "dynatomo/schedule.hpp"
#include "dynatomo/weyl.hpp"

namespace dynatomo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitGolden = 4;

inline constexpr std::uint64_t kDefaultSeed = 20260101;

// Independent streams carved out of the run seed.
inline constexpr std::uint64_t kStateStream = 1;
inline constexpr std::uint64_t kSamplingStream = 2;
inline constexpr std::uint64_t kFamilyStream = 3;
inline constexpr std::uint64_t kWitnessStream = 4;

inline int exit_code_for(ErrorCode code) {
    switch (category(code)) {
        case ErrorCategory::Config:
        case ErrorCategory::Io: return kExitConfig;
        case ErrorCategory::Golden: return kExitGolden;
        case ErrorCategory::Numerical: return kExitNumerical;
    }
    return kExitNumerical;
}

struct RunOptions {
    std::optional<std::uint64_t> seed;      // --seed
    std::optional<std::uint64_t> shots;     // --shots
    std::optional<std::uint64_t> env_seed;  // DYNATOMO_SEED
    std::string golden_dir;
};

struct CommandResult {
    std::string name;  // default stem for report files
    json report;
    std::optional<ProbabilityRecord> record;
    int exit_code = kExitOk;
    std::vector<std::string> summary;  // human-readable lines for stdout
};

/// --seed, then the config, then DYNATOMO_SEED, then a fixed default.
inline std::uint64_t resolve_seed(const RunOptions &opts, const std::optional<ExperimentConfig> &cfg = std::nullopt) {
    if (opts.seed) return *opts.seed;
    if (cfg && cfg->seed) return *cfg->seed;
    if (opts.env_seed) return *opts.env_seed;
    return kDefaultSeed;
}

inline std::uint64_t resolve_shots(const RunOptions &opts, const std::optional<ExperimentConfig> &cfg = std::nullopt) {
    if (opts.shots) return *opts.shots;
    if (cfg && cfg->shots) return *cfg->shots;
    return 0;
}

inline std::optional<std::uint64_t> parse_seed_text(const std::string &text) {
    if (text.empty() || text.size() > 20) return std::nullopt;
    std::uint64_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') return std::nullopt;
        const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
        if (value > (UINT64_MAX - digit) / 10) return std::nullopt;
        value = value * 10 + digit;
    }
    return value;
}

// ---------------------------------------------------------------------------
// Building library objects from a configuration.

inline CVector resolve_probe(const ExperimentConfig &cfg) {
    if (cfg.fiducial) {
        const double n = vector_norm(*cfg.fiducial);
        if (!(n > 0.0)) throw Error(ErrorCode::ZeroVector, "fiducial vector is zero");
        return scaled(*cfg.fiducial, 1.0 / n);
    }
    return builtin_fiducial(*cfg.dimension);
}

inline ProjectorFamily build_family(const ExperimentConfig &cfg, std::uint64_t seed) {
    const auto &f = *cfg.family;
    const std::size_t d = *cfg.dimension;
    switch (f.kind) {
        case FamilySpec::Kind::Example48: return example48::family();
        case FamilySpec::Kind::Random:
            return random_projector_family(d, f.count, f.seed.value_or(Rng::derive_seed(seed, kFamilyStream)));
        case FamilySpec::Kind::Sic: {
            const WeylHeisenbergBasis basis(d);
            std::vector<SubnormalizedProjector> ps;
            for (auto &v : orbit(basis, resolve_probe(cfg))) ps.push_back({1.0 / static_cast<double>(d), std::move(v)});
            return ProjectorFamily(d, std::move(ps));
        }
        case FamilySpec::Kind::Inline: {
            std::vector<std::pair<double, CVector>> entries;
            for (const auto &p : f.projectors) entries.emplace_back(p.weight, p.direction);
            return ProjectorFamily::from_unnormalized(d, std::move(entries));
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown family kind");
}

inline CMatrix build_state(const ExperimentConfig &cfg, std::uint64_t seed) {
    const std::size_t d = *cfg.dimension;
    const StateSpec spec = cfg.state.value_or(StateSpec{});
    switch (spec.kind) {
        case StateSpec::Kind::Random: return random_density_matrix(d, Rng::derive_seed(seed, kStateStream));
        case StateSpec::Kind::MaximallyMixed: return CMatrix::identity(d) * cplx(1.0 / static_cast<double>(d));
        case StateSpec::Kind::Matrix: validate_density_matrix(*spec.matrix); return *spec.matrix;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown state kind");
}

inline std::optional<TimeGrid> build_grid(const ExperimentConfig &cfg, std::size_t count) {
    if (!cfg.grid) return std::nullopt;
    if (!cfg.grid->instants.empty()) return TimeGrid(cfg.grid->instants);
    return TimeGrid::uniform(count, *cfg.grid->start, *cfg.grid->step);
}

inline std::map<std::size_t, DirectionOverrides> build_overrides(const ExperimentConfig &cfg) {
    std::map<std::size_t, DirectionOverrides> out;
    for (const auto &[i, spec] : cfg.overrides) out[i - 1] = {spec.z, spec.eta, spec.u_tilde};
    return out;
}

inline DecayFamily build_decay(const ExperimentConfig &cfg) {
    if (cfg.schedule && cfg.schedule->gammas) return DecayFamily::exponential(*cfg.schedule->gammas);
    return DecayFamily::default_for(*cfg.dimension);
}

// ---------------------------------------------------------------------------
// Report fragments.

inline json record_json(const ProbabilityRecord &rec) {
    json rows = json::array();
    for (std::size_t i = 0; i < rec.grid.size(); ++i) {
        rows.push_back({{"t", rec.grid[i]}, {"p_exact", rec.exact[i]}, {"p_sampled", rec.values[i]}});
    }
    return rows;
}

inline json design_json(const DesignMatrix &m) {
    return {{"det", finite_or_null(m.det)}, {"condition", finite_or_null(m.condition)}, {"matrix", encode(m.matrix)}};
}

inline json reconstruction_json(const ReconstructionReport &r) {
    json out{{"recovered_state", encode(r.recovered_rho)},
             {"raw_solution", encode(r.raw_solution)},
             {"trace_deviation", r.trace_deviation},
             {"min_eigenvalue", r.min_eigenvalue},
             {"design_condition", finite_or_null(r.design_condition)}};
    if (r.frobenius_error_vs_truth) out["frobenius_error"] = *r.frobenius_error_vs_truth;
    return out;
}

inline json ic_json(const IcReport &r) {
    return {{"informationally_complete", r.informationally_complete},
            {"rank", r.rank},
            {"required_rank", r.required_rank},
            {"singular_values", r.singular_values}};
}

inline ExperimentConfig echo_config(ExperimentConfig cfg, std::uint64_t seed, std::uint64_t shots) {
    cfg.seed = seed;
    cfg.shots = shots;
    return cfg;
}

inline std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// rud: quasi-Householder dynamics with one measured outcome.

inline CommandResult cmd_rud(const ExperimentConfig &cfg, const RunOptions &opts) {
    const std::uint64_t seed = resolve_seed(opts, cfg);
    const std::uint64_t shots = resolve_shots(opts, cfg);
    const ProjectorFamily fam = build_family(cfg, seed);
    const std::size_t default_outcome = cfg.family->kind == FamilySpec::Kind::Example48 ? 7 : 1;
    const std::size_t j = cfg.outcome_index.value_or(default_outcome);

    RudProtocolConfig pc{fam, j - 1, std::nullopt, std::nullopt, shots, Rng::derive_seed(seed, kSamplingStream),
                         build_overrides(cfg), build_state(cfg, seed)};
    if (cfg.schedule && cfg.schedule->thetas) pc.schedule = ExpDecaySchedule(*cfg.schedule->thetas);
    pc.grid = build_grid(cfg, fam.size());
    const RudRun run = run_protocol(pc);

    CommandResult out;
    out.name = "rud";
    const auto &fe = run.frame_eigenvalues;
    json hh = json::array();
    for (std::size_t i = 0; i < run.householders.reflections.size(); ++i) {
        const auto &r = run.householders.reflections[i];
        hh.push_back({{"index", i + 1},
                      {"eta", encode(r.eta)},
                      {"case", r.kind == HouseholderCase::Case1 ? 1 : 2},
                      {"lambda", encode(run.householders.directions[i].lambda())},
                      {"matrix", encode(r.matrix)}});
    }
    out.report = {
        {"command", "run"},
        {"protocol", "rud"},
        {"config", config_to_json(echo_config(cfg, seed, shots))},
        {"dimension", fam.dimension()},
        {"outcome_index", j},
        {"frame", {{"matrix", encode(run.frame)},
                   {"eigenvalues", fe},
                   {"condition", fe.back() / fe.front()}}},
        {"quasi_householder", {{"reflections", std::move(hh)},
                               {"p_tilde", run.householders.p_tilde},
                               {"max_conjugation_residual", run.householders.max_conjugation_residual}}},
        {"schedule", {{"thetas", run.schedule.thetas()}}},
        {"design", design_json(run.design)},
        {"probabilities", record_json(run.record)},
        {"shots", shots},
        {"seed", seed},
        {"q_traces", run.q_traces},
        {"true_state", encode(pc.rho0)},
        {"reconstruction", reconstruction_json(run.report)},
    };
    out.record = run.record;
    out.summary = {"rud protocol, d = " + std::to_string(fam.dimension()) + ", x = " + std::to_string(fam.size()) +
                       ", outcome " + std::to_string(j),
                   "design condition " + fmt(run.design.condition),
                   "frobenius error " + fmt(*run.report.frobenius_error_vs_truth)};
    return out;
}

// ---------------------------------------------------------------------------
// avgchannel: single-projector tomography under the average channel.

inline CommandResult cmd_avgchannel(const ExperimentConfig &cfg, const RunOptions &opts) {
    const std::uint64_t seed = resolve_seed(opts, cfg);
    const std::uint64_t shots = resolve_shots(opts, cfg);
    const std::size_t d = *cfg.dimension;
    const AverageChannel ch(WeylHeisenbergBasis(d), build_decay(cfg));
    const CVector phi = resolve_probe(cfg);
    const CMatrix rho0 = build_state(cfg, seed);
    const auto given = build_grid(cfg, d * d);
    const TimeGrid grid = given ? *given : default_channel_grid(ch.decay());

    const auto states = adjoint_orbit(ch.basis(), phi);
    const auto gram = gram_squared(states);
    const auto effects = single_projector_effects(ch.basis(), phi);
    const auto ic = is_ic(effects);
    if (!ic.informationally_complete) {
        throw Error(ErrorCode::NotInformationallyComplete,
                    "probe orbit is not informationally complete (det A = " + fmt(gram.det) + ")");
    }
    const auto run =
        reconstruct_via_single_projector(ch, rho0, phi, grid, shots, Rng::derive_seed(seed, kSamplingStream));

    CommandResult out;
    out.name = "avgchannel";
    out.report = {
        {"command", "run"},
        {"protocol", "avgchannel"},
        {"config", config_to_json(echo_config(cfg, seed, shots))},
        {"dimension", d},
        {"probe", encode(phi)},
        {"gram_squared", {{"det", gram.det}, {"matrix", encode(gram.matrix)}}},
        {"ic", ic_json(ic)},
        {"decay_rates", ch.decay().gammas()},
        {"design", design_json(run.design)},
        {"probabilities", record_json(run.record)},
        {"shots", shots},
        {"seed", seed},
        {"overlaps", run.overlaps},
        {"true_state", encode(rho0)},
        {"reconstruction", reconstruction_json(run.report)},
    };
    out.record = run.record;
    out.summary = {"single-projector tomography, d = " + std::to_string(d),
                   "design condition " + fmt(run.design.condition) + ", det A " + fmt(gram.det),
                   "frobenius error " + fmt(*run.report.frobenius_error_vs_truth)};
    return out;
}

// ---------------------------------------------------------------------------
// sic-simulate: SIC probabilities from one projector and d^2 instants.

inline CommandResult cmd_sic_simulate(const ExperimentConfig &cfg, const RunOptions &opts) {
    const std::uint64_t seed = resolve_seed(opts, cfg);
    const std::uint64_t shots = resolve_shots(opts, cfg);
    const std::size_t d = *cfg.dimension;
    const AverageChannel ch(WeylHeisenbergBasis(d), build_decay(cfg));
    const CVector phi = resolve_probe(cfg);
    const CMatrix rho0 = build_state(cfg, seed);
    const auto given = build_grid(cfg, d * d);
    const TimeGrid grid = given ? *given : default_channel_grid(ch.decay());
    const auto sim = simulate_sic(rho0, phi, ch, grid, shots, Rng::derive_seed(seed, kSamplingStream));

    RVector direct;
    double total = 0.0;
    double worst = 0.0;
    const auto states = orbit(ch.basis(), phi);
    for (std::size_t k = 0; k < states.size(); ++k) {
        direct.push_back(frobenius_inner(projector(states[k]), rho0).real() / static_cast<double>(d));
        total += sim.probabilities[k];
        worst = std::max(worst, std::abs(sim.probabilities[k] - direct[k]));
    }

    CommandResult out;
    out.name = "sic_simulate";
    out.report = {
        {"command", "sic-simulate"},
        {"config", config_to_json(echo_config(cfg, seed, shots))},
        {"dimension", d},
        {"fiducial", encode(phi)},
        {"design", design_json(sim.run.design)},
        {"probabilities", record_json(sim.run.record)},
        {"shots", shots},
        {"seed", seed},
        {"sic_probabilities", sim.probabilities},
        {"direct_born_probabilities", direct},
        {"max_deviation_from_direct", worst},
        {"sum", total},
        {"true_state", encode(rho0)},
    };
    out.record = sim.run.record;
    out.summary = {"SIC simulation, d = " + std::to_string(d) + ", shots = " + std::to_string(shots),
                   "sum of probabilities " + fmt(total), "max deviation from direct Born rule " + fmt(worst)};
    return out;
}

// ---------------------------------------------------------------------------
// ic-check: frame operator, canonical POVM and rank test for a family.

inline CommandResult cmd_ic_check(const ExperimentConfig &cfg, const RunOptions &opts) {
    const std::uint64_t seed = resolve_seed(opts, cfg);
    const ProjectorFamily fam = build_family(cfg, seed);
    const CMatrix frame = frame_operator(fam);
    const auto frame_eig = hermitian_eigen(frame).eigenvalues;
    const bool pd = frame_eig.front() > kPositiveDefiniteFloor * frame_eig.back();
    const auto ic = is_ic(fam.matrices());

    CommandResult out;
    out.name = "ic_check";
    out.report = {
        {"command", "ic-check"},
        {"config", config_to_json(echo_config(cfg, seed, resolve_shots(opts, cfg)))},
        {"dimension", fam.dimension()},
        {"count", fam.size()},
        {"frame", {{"matrix", encode(frame)}, {"eigenvalues", frame_eig}, {"positive_definite", pd}}},
        {"ic", ic_json(ic)},
    };
    if (pd) {
        const Povm povm = canonical_ic_povm(fam);
        CMatrix total(fam.dimension(), fam.dimension());
        for (const auto &e : povm.elements) total += e;
        out.report["canonical_povm"] = {
            {"completeness_defect", frobenius_norm(total - CMatrix::identity(fam.dimension()))},
            {"ic", ic_json(is_ic(povm.elements))}};
    }
    out.exit_code = pd && ic.informationally_complete ? kExitOk : kExitNumerical;
    out.summary = {"family of " + std::to_string(fam.size()) + " projectors in d = " + std::to_string(fam.dimension()),
                   std::string("frame operator ") + (pd ? "positive definite" : "NOT positive definite"),
                   "rank " + std::to_string(ic.rank) + " of " + std::to_string(ic.required_rank) + ": " +
                       (ic.informationally_complete ? "informationally complete" : "NOT informationally complete")};
    return out;
}

// ---------------------------------------------------------------------------
// wh-demo: Weyl-Heisenberg identities.

inline constexpr double kDemoTolerance = 1e-10;

inline CommandResult cmd_wh_demo(std::size_t d, const RunOptions &opts) {
    const std::uint64_t seed = resolve_seed(opts);
    const WeylHeisenbergBasis basis(d);
    double trace_defect = 0.0;
    double orthogonality_defect = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a) {
        if (a != 0) trace_defect = std::max(trace_defect, std::abs(trace(basis[a])));
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const cplx expected = a == b ? cplx(static_cast<double>(d)) : cplx{};
            orthogonality_defect =
                std::max(orthogonality_defect, std::abs(frobenius_inner(basis[a], basis[b]) - expected));
        }
    }
    double commutation_defect = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            const cplx expected = root_of_unity(d, -static_cast<long long>(j * k));
            commutation_defect = std::max(commutation_defect, std::abs(commutation_check(basis, j, k) - expected));
        }
    double twirl_defect = 0.0;
    constexpr std::size_t kWitnesses = 20;
    for (std::size_t n = 0; n < kWitnesses; ++n) {
        const CMatrix rho = random_density_matrix(d, Rng::derive_seed(Rng::derive_seed(seed, kWitnessStream), n));
        const CMatrix target = CMatrix::identity(d) * cplx(static_cast<double>(d));
        twirl_defect = std::max(twirl_defect, frobenius_norm(twirl(basis, rho) - target));
    }
    json ops = json::array();
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const auto [j, k] = basis.exponents(a);
        ops.push_back({{"index", a}, {"j", j}, {"k", k}, {"adjoint_index", basis.adjoint_index(a)},
                       {"matrix", encode(basis[a])}});
    }
    const bool ok = std::max({trace_defect, orthogonality_defect, commutation_defect, twirl_defect}) <= kDemoTolerance;

    CommandResult out;
    out.name = "wh_demo";
    out.report = {
        {"command", "wh-demo"},
        {"dimension", d},
        {"seed", seed},
        {"operators", std::move(ops)},
        {"checks", {{"max_trace_defect", trace_defect},
                    {"max_orthogonality_defect", orthogonality_defect},
                    {"max_commutation_defect", commutation_defect},
                    {"max_twirl_defect", twirl_defect},
                    {"twirl_witnesses", kWitnesses},
                    {"tolerance", kDemoTolerance},
                    {"passed", ok}}},
    };
    out.exit_code = ok ? kExitOk : kExitNumerical;
    out.summary = {"Weyl-Heisenberg basis, d = " + std::to_string(d) + " (" + std::to_string(basis.size()) +
                       " operators)",
                   "trace " + fmt(trace_defect) + ", orthogonality " + fmt(orthogonality_defect) + ", commutation " +
                       fmt(commutation_defect) + ", twirl " + fmt(twirl_defect),
                   ok ? "all identities hold" : "IDENTITY VIOLATED"};
    return out;
}

// ---------------------------------------------------------------------------
// sic-verify: the built-in fiducials and their Gram structure.

inline double sic_gram_det_closed_form(std::size_t d) {
    const double dd = static_cast<double>(d);
    return dd * std::pow(dd / (dd + 1.0), dd * dd - 1.0);
}

inline CommandResult cmd_sic_verify(std::size_t d) {
    const WeylHeisenbergBasis basis(d);
    const CVector phi = builtin_fiducial(d);
    const auto overlaps = fiducial_overlaps(basis, phi);
    const auto states = orbit(basis, phi);
    const auto sic = sic_check(states);
    const auto gram = gram_squared(states);
    const double expected_det = sic_gram_det_closed_form(d);
    std::vector<CMatrix> projectors;
    for (const auto &s : states) projectors.push_back(projector(s));
    const auto ic = is_ic(projectors);
    const auto frame = orbit_frame_operator(states);
    const double k_defect = frobenius_norm(frame.k - CMatrix::identity(d) * cplx(static_cast<double>(d)));
    const double overlap_defect = fiducial_defect(basis, phi);
    const bool ok = sic.is_sic && overlap_defect <= 1e-12 && std::abs(gram.det - expected_det) <= 1e-10;

    CommandResult out;
    out.name = "sic_verify";
    out.report = {
        {"command", "sic-verify"},
        {"dimension", d},
        {"fiducial", encode(phi)},
        {"overlaps", overlaps},
        {"max_overlap_defect", overlap_defect},
        {"sic", {{"is_sic", sic.is_sic},
                 {"max_pairwise_deviation", sic.max_pairwise_deviation},
                 {"completeness_defect", sic.completeness_defect}}},
        {"gram_squared", {{"det", gram.det}, {"expected_det", expected_det}, {"matrix", encode(gram.matrix)}}},
        {"ic", ic_json(ic)},
        {"frame_k_defect", k_defect},
        {"passed", ok},
    };
    out.exit_code = ok ? kExitOk : kExitNumerical;
    out.summary = {"fiducial for d = " + std::to_string(d) + ": max overlap defect " + fmt(overlap_defect),
                   std::string("SIC: ") + (sic.is_sic ? "yes" : "NO") + ", det A = " + fmt(gram.det) +
                       " (closed form " + fmt(expected_det) + ")",
                   std::string("orbit ") + (ic.informationally_complete ? "is" : "is NOT") +
                       " informationally complete"};
    return out;
}

// ---------------------------------------------------------------------------
// example-4-8: the worked qutrit example against the shipped golden file.

struct GoldenDelta {
    std::string entry;
    double expected = 0.0;
    double actual = 0.0;
};

namespace detail {

inline void diff_matrix(const std::string &name, const json &golden, const CMatrix &actual, double tol,
                        std::vector<GoldenDelta> &mismatches, double &worst) {
    if (!golden.is_array() || golden.size() != actual.rows()) {
        throw Error(ErrorCode::GoldenMismatch, "golden entry '" + name + "' has the wrong shape");
    }
    for (std::size_t r = 0; r < actual.rows(); ++r) {
        if (!golden[r].is_array() || golden[r].size() != actual.cols()) {
            throw Error(ErrorCode::GoldenMismatch, "golden entry '" + name + "' has the wrong shape");
        }
        for (std::size_t c = 0; c < actual.cols(); ++c) {
            const cplx want = is_complex(golden[r][c]) ? decode_complex(golden[r][c]) : cplx(golden[r][c].get<double>());
            const cplx got = actual(r, c);
            const std::string where = name + "[" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "]";
            const std::pair<double, double> parts[] = {{want.real(), got.real()}, {want.imag(), got.imag()}};
            for (std::size_t p = 0; p < 2; ++p) {
                const double delta = std::abs(parts[p].first - parts[p].second);
                worst = std::max(worst, delta);
                if (!(delta <= tol)) {
                    mismatches.push_back({where + (p == 0 ? ".re" : ".im"), parts[p].first, parts[p].second});
                }
            }
        }
    }
}

}  // namespace detail

inline json load_golden(const std::string &golden_dir) {
    const std::string path = golden_dir + "/example_4_8.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open golden file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return json::parse(text.str());
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ParseError, "golden file: " + std::string(e.what()));
    }
}

inline CommandResult cmd_example48(const RunOptions &opts) {
    const std::uint64_t seed = resolve_seed(opts);
    const std::uint64_t shots = resolve_shots(opts);
    const json golden = load_golden(opts.golden_dir);
    const double exact_tol = golden.at("exact_tolerance").get<double>();
    const double matrix_tol = golden.at("householder_tolerance").get<double>();

    const auto fam = example48::family();
    const CMatrix frame_vectors = example48::frame_from_vectors();
    const CMatrix frame_printed = to_complex(example48::frame_closed_form());
    const CMatrix frame_inverse = inverse(frame_printed);
    const CMatrix frame_inv_sqrt = inv_sqrt_pd(frame_printed);
    const auto set = example48::displayed_householder_set();

    std::vector<GoldenDelta> mismatches;
    double worst_exact = 0.0;
    double worst_householder = 0.0;
    detail::diff_matrix("frame_operator", golden.at("frame_operator"), frame_vectors, exact_tol, mismatches,
                        worst_exact);
    detail::diff_matrix("frame_inverse", golden.at("frame_inverse"), frame_inverse, exact_tol, mismatches,
                        worst_exact);
    detail::diff_matrix("frame_inverse_sqrt", golden.at("frame_inverse_sqrt"), frame_inv_sqrt, exact_tol, mismatches,
                        worst_exact);
    for (const auto &[key, value] : golden.at("householders").items()) {
        const std::size_t i = std::stoul(key) - 1;
        detail::diff_matrix("H" + key, value, set.reflections.at(i).matrix, matrix_tol, mismatches,
                            worst_householder);
    }
    const auto &h7 = set.reflections[example48::kPropertyCheckedIndex].matrix;
    const auto &b7 = set.directions[example48::kReference].b;
    const double h7_unitarity = unitarity_defect(h7);
    const double h7_fixes_b7 = vector_norm([&] {
        CVector v = apply<cplx>(h7, b7);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= b7[k];
        return v;
    }());
    const double h7_hermiticity = hermiticity_defect(h7);
    const double h7_involution = frobenius_norm(h7 * h7 - CMatrix::identity(3));
    const bool h7_ok = std::max({h7_unitarity, h7_fixes_b7, h7_hermiticity, h7_involution}) <= 1e-10;

    // The protocol itself runs on the true canonical POVM of the nine vectors.
    RudProtocolConfig pc{fam,
                         example48::kReference,
                         std::nullopt,
                         std::nullopt,
                         shots,
                         Rng::derive_seed(seed, kSamplingStream),
                         {},
                         random_density_matrix(3, Rng::derive_seed(seed, kStateStream))};
    const RudRun run = run_protocol(pc);

    json deltas = json::array();
    for (const auto &m : mismatches) {
        deltas.push_back({{"entry", m.entry}, {"expected", m.expected}, {"actual", m.actual},
                          {"delta", std::abs(m.expected - m.actual)}});
    }
    json printed_set = json::object();
    for (std::size_t i = 0; i < set.reflections.size(); ++i) {
        printed_set[std::to_string(i + 1)] = encode(set.reflections[i].matrix);
    }

    CommandResult out;
    out.name = "example_4_8";
    out.report = {
        {"command", "example-4-8"},
        {"seed", seed},
        {"shots", shots},
        {"frame_from_vectors", encode(frame_vectors)},
        {"frame_printed", encode(frame_printed)},
        {"frame_printed_inverse", encode(frame_inverse)},
        {"frame_printed_inverse_sqrt", encode(frame_inv_sqrt)},
        {"householders_from_printed_frame", std::move(printed_set)},
        {"h7_properties", {{"unitarity_defect", h7_unitarity},
                           {"fixes_b7_defect", h7_fixes_b7},
                           {"hermiticity_defect", h7_hermiticity},
                           {"involution_defect", h7_involution},
                           {"passed", h7_ok}}},
        {"golden", {{"mismatches", std::move(deltas)},
                    {"max_exact_delta", worst_exact},
                    {"max_householder_delta", worst_householder},
                    {"exact_tolerance", exact_tol},
                    {"householder_tolerance", matrix_tol},
                    {"passed", mismatches.empty() && h7_ok}}},
        {"protocol", {{"outcome_index", example48::kReference + 1},
                      {"frame_eigenvalues", run.frame_eigenvalues},
                      {"p_tilde", run.householders.p_tilde},
                      {"design", design_json(run.design)},
                      {"probabilities", record_json(run.record)},
                      {"q_traces", run.q_traces},
                      {"true_state", encode(pc.rho0)},
                      {"reconstruction", reconstruction_json(run.report)}}},
    };
    out.record = run.record;
    out.exit_code = mismatches.empty() && h7_ok ? kExitOk : kExitGolden;
    out.summary = {"worked qutrit example, reference outcome 7",
                   "max delta on exact entries " + fmt(worst_exact) + ", on printed quasi-Householders " +
                       fmt(worst_householder),
                   "protocol frobenius error " + fmt(*run.report.frobenius_error_vs_truth)};
    for (const auto &m : mismatches) {
        out.summary.push_back("GOLDEN MISMATCH " + m.entry + ": expected " + fmt(m.expected) + ", got " +
                              fmt(m.actual));
    }
    return out;
}

// ---------------------------------------------------------------------------

inline CommandResult cmd_run(const ExperimentConfig &cfg, const RunOptions &opts) {
    switch (cfg.protocol) {
        case Protocol::Rud: return cmd_rud(cfg, opts);
        case Protocol::AvgChannel: return cmd_avgchannel(cfg, opts);
        case Protocol::SicSimulate: return cmd_sic_simulate(cfg, opts);
        case Protocol::IcCheck: return cmd_ic_check(cfg, opts);
        case Protocol::Example48: {
            RunOptions o = opts;
            o.seed = resolve_seed(opts, cfg);
            o.shots = resolve_shots(opts, cfg);
            return cmd_example48(o);
        }
        case Protocol::WhDemo: {
            RunOptions o = opts;
            o.seed = resolve_seed(opts, cfg);
            return cmd_wh_demo(*cfg.dimension, o);
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown protocol");
}

}  // namespace dynatomo::cli
