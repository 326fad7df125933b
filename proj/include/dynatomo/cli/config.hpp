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

// Experiment configuration files.
//
//   {
//     "protocol": "rud" | "avgchannel" | "sic-simulate" | "ic-check" | "example-4-8" | "wh-demo",
//     "dimension": 3,
//     "family": "example-4-8" | "sic" | {"builder": "random", "count": 9, "seed": 1}
//               | {"projectors": [[p, [[re, im], ...]], ...]},
//     "outcome_index": 7,                         1-based
//     "schedule": {"thetas": [...]} | {"gammas": [...]},
//     "grid": [t1, t2, ...] | {"start": 0.0, "step": 0.1},
//     "shots": 0,                                 0 means exact probabilities
//     "seed": 42,
//     "overrides": {"3": {"z": [re, im], "eta": [re, im], "u_tilde": [[re, im], ...]}},
//     "state": "random" | "maximally-mixed" | {"matrix": [[[re, im], ...], ...]},
//     "fiducial": [[re, im], ...],
//     "output": {"json": "report.json", "csv": "probabilities.csv"}
//   }
//
// Every violation is collected before anything is thrown. Structural
// problems raise SchemaError; cross-field problems found on a structurally
// valid file raise InvariantError. Each message carries a JSON pointer.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynatomo/cli/json_io.hpp"
#include "dynatomo/error.hpp"
#include "dynatomo/matcore.hpp"

namespace dynatomo::cli {

enum class Protocol { Rud, AvgChannel, SicSimulate, IcCheck, Example48, WhDemo };

inline constexpr std::pair<Protocol, std::string_view> kProtocolNames[] = {
    {Protocol::Rud, "rud"},           {Protocol::AvgChannel, "avgchannel"}, {Protocol::SicSimulate, "sic-simulate"},
    {Protocol::IcCheck, "ic-check"}, {Protocol::Example48, "example-4-8"}, {Protocol::WhDemo, "wh-demo"},
};

inline std::string_view protocol_name(Protocol p) {
    for (const auto &[k, name] : kProtocolNames)
        if (k == p) return name;
    return "unknown";
}

inline std::optional<Protocol> parse_protocol(std::string_view name) {
    for (const auto &[k, n] : kProtocolNames)
        if (n == name) return k;
    return std::nullopt;
}

struct InlineProjector {
    double weight = 0.0;
    CVector direction;
    bool operator==(const InlineProjector &) const = default;
};

struct FamilySpec {
    enum class Kind { Inline, Example48, Random, Sic };
    Kind kind = Kind::Inline;
    std::vector<InlineProjector> projectors;  // Inline
    std::size_t count = 0;                    // Random
    std::optional<std::uint64_t> seed;        // Random
    bool operator==(const FamilySpec &) const = default;
};

struct ScheduleSpec {
    std::optional<std::vector<double>> thetas;
    std::optional<std::vector<double>> gammas;
    bool operator==(const ScheduleSpec &) const = default;
};

struct GridSpec {
    std::vector<double> instants;  // explicit list, or empty with start/step
    std::optional<double> start;
    std::optional<double> step;
    bool operator==(const GridSpec &) const = default;
};

struct OverrideSpec {
    std::optional<cplx> z;
    std::optional<cplx> eta;
    std::optional<CVector> u_tilde;
    bool operator==(const OverrideSpec &) const = default;
};

struct StateSpec {
    enum class Kind { Random, MaximallyMixed, Matrix };
    Kind kind = Kind::Random;
    std::optional<CMatrix> matrix;
    bool operator==(const StateSpec &) const = default;
};

struct OutputSpec {
    std::optional<std::string> json;
    std::optional<std::string> csv;
    bool operator==(const OutputSpec &) const = default;
};

struct ExperimentConfig {
    Protocol protocol = Protocol::Rud;
    std::optional<std::size_t> dimension;
    std::optional<FamilySpec> family;
    std::optional<std::size_t> outcome_index;  // 1-based
    std::optional<ScheduleSpec> schedule;
    std::optional<GridSpec> grid;
    std::optional<std::uint64_t> shots;
    std::optional<std::uint64_t> seed;
    std::map<std::size_t, OverrideSpec> overrides;  // 1-based keys
    std::optional<StateSpec> state;
    std::optional<CVector> fiducial;
    OutputSpec output;
    bool operator==(const ExperimentConfig &) const = default;
};

struct Violation {
    std::string pointer;
    std::string message;
};

class ConfigError : public Error {
   public:
    ConfigError(ErrorCode code, std::vector<Violation> violations)
        : Error(code, join(violations)), violations_(std::move(violations)) {}

    const std::vector<Violation> &violations() const noexcept { return violations_; }

   private:
    static std::string join(const std::vector<Violation> &vs) {
        std::string out = std::to_string(vs.size()) + " problem(s)";
        for (const auto &v : vs) out += "\n  " + (v.pointer.empty() ? std::string("/") : v.pointer) + ": " + v.message;
        return out;
    }

    std::vector<Violation> violations_;
};

/// Number of outcomes a family spec describes, when it is known statically.
inline std::optional<std::size_t> family_size(const FamilySpec &f, std::optional<std::size_t> d) {
    switch (f.kind) {
        case FamilySpec::Kind::Inline: return f.projectors.size();
        case FamilySpec::Kind::Example48: return 9;
        case FamilySpec::Kind::Random: return f.count;
        case FamilySpec::Kind::Sic:
            if (d) return *d * *d;
            return std::nullopt;
    }
    return std::nullopt;
}

namespace detail {

inline std::string pointer_token(std::string_view key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

class Checker {
   public:
    std::vector<Violation> schema;
    std::vector<Violation> invariant;

    void fail(std::string ptr, std::string msg) { schema.push_back({std::move(ptr), std::move(msg)}); }
    void violate(std::string ptr, std::string msg) { invariant.push_back({std::move(ptr), std::move(msg)}); }

    void reject_unknown(const json &obj, const std::string &ptr, std::initializer_list<std::string_view> allowed) {
        for (const auto &[key, _] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(ptr + "/" + pointer_token(key), "unknown key");
            }
        }
    }

    std::optional<double> number(const json &j, const std::string &ptr) {
        if (!j.is_number()) {
            fail(ptr, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::optional<std::uint64_t> uinteger(const json &j, const std::string &ptr) {
        if (j.is_number_unsigned()) return j.get<std::uint64_t>();
        if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
        fail(ptr, "expected a nonnegative integer");
        return std::nullopt;
    }

    std::optional<cplx> complex(const json &j, const std::string &ptr) {
        if (!is_complex(j)) {
            fail(ptr, "expected a complex number [re, im]");
            return std::nullopt;
        }
        return decode_complex(j);
    }

    std::optional<CVector> cvector(const json &j, const std::string &ptr) {
        if (!j.is_array() || j.empty()) {
            fail(ptr, "expected a nonempty list of [re, im] pairs");
            return std::nullopt;
        }
        CVector out;
        bool ok = true;
        for (std::size_t i = 0; i < j.size(); ++i) {
            const auto z = complex(j[i], ptr + "/" + std::to_string(i));
            if (z) out.push_back(*z);
            else ok = false;
        }
        return ok ? std::optional(out) : std::nullopt;
    }

    std::optional<std::vector<double>> rlist(const json &j, const std::string &ptr) {
        if (!j.is_array() || j.empty()) {
            fail(ptr, "expected a nonempty list of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        bool ok = true;
        for (std::size_t i = 0; i < j.size(); ++i) {
            const auto x = number(j[i], ptr + "/" + std::to_string(i));
            if (x) out.push_back(*x);
            else ok = false;
        }
        return ok ? std::optional(out) : std::nullopt;
    }

    std::optional<CMatrix> cmatrix(const json &j, const std::string &ptr) {
        if (!j.is_array() || j.empty()) {
            fail(ptr, "expected a nonempty list of rows");
            return std::nullopt;
        }
        std::vector<CVector> rows;
        for (std::size_t r = 0; r < j.size(); ++r) {
            auto row = cvector(j[r], ptr + "/" + std::to_string(r));
            if (!row) return std::nullopt;
            rows.push_back(std::move(*row));
        }
        const std::size_t cols = rows.front().size();
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() != cols) {
                fail(ptr + "/" + std::to_string(r), "row length differs from row 0");
                return std::nullopt;
            }
        }
        CMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
        return m;
    }
};

inline std::optional<FamilySpec> parse_family(Checker &ck, const json &j) {
    const std::string ptr = "/family";
    FamilySpec f;
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "example-4-8") f.kind = FamilySpec::Kind::Example48;
        else if (name == "sic") f.kind = FamilySpec::Kind::Sic;
        else {
            ck.fail(ptr, "unknown family builder '" + name + "' (expected example-4-8 or sic)");
            return std::nullopt;
        }
        return f;
    }
    if (!j.is_object()) {
        ck.fail(ptr, "expected a builder name or an object");
        return std::nullopt;
    }
    if (j.contains("projectors")) {
        ck.reject_unknown(j, ptr, {"projectors"});
        const auto &list = j["projectors"];
        if (!list.is_array() || list.empty()) {
            ck.fail(ptr + "/projectors", "expected a nonempty list of [p, vector] entries");
            return std::nullopt;
        }
        f.kind = FamilySpec::Kind::Inline;
        bool ok = true;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = ptr + "/projectors/" + std::to_string(i);
            if (!list[i].is_array() || list[i].size() != 2) {
                ck.fail(p, "expected [p, [[re, im], ...]]");
                ok = false;
                continue;
            }
            const auto w = ck.number(list[i][0], p + "/0");
            const auto v = ck.cvector(list[i][1], p + "/1");
            if (w && v) f.projectors.push_back({*w, *v});
            else ok = false;
        }
        return ok ? std::optional(f) : std::nullopt;
    }
    ck.reject_unknown(j, ptr, {"builder", "count", "seed"});
    if (!j.contains("builder") || !j["builder"].is_string() || j["builder"].get<std::string>() != "random") {
        ck.fail(ptr + "/builder", "object families need \"builder\": \"random\" or a \"projectors\" list");
        return std::nullopt;
    }
    f.kind = FamilySpec::Kind::Random;
    if (!j.contains("count")) {
        ck.fail(ptr + "/count", "random families need a count");
        return std::nullopt;
    }
    const auto count = ck.uinteger(j["count"], ptr + "/count");
    if (!count) return std::nullopt;
    f.count = static_cast<std::size_t>(*count);
    if (j.contains("seed")) {
        f.seed = ck.uinteger(j["seed"], ptr + "/seed");
        if (!f.seed) return std::nullopt;
    }
    return f;
}

inline std::optional<GridSpec> parse_grid(Checker &ck, const json &j) {
    const std::string ptr = "/grid";
    GridSpec g;
    if (j.is_array()) {
        auto list = ck.rlist(j, ptr);
        if (!list) return std::nullopt;
        bool ok = true;
        for (std::size_t i = 0; i < list->size(); ++i) {
            if (!((*list)[i] >= 0.0)) {
                ck.fail(ptr + "/" + std::to_string(i), "time instants must be nonnegative");
                ok = false;
            }
            if (i > 0 && (*list)[i] == (*list)[i - 1]) {
                ck.fail(ptr + "/" + std::to_string(i), "duplicate time instant");
                ok = false;
            } else if (i > 0 && (*list)[i] < (*list)[i - 1]) {
                ck.fail(ptr + "/" + std::to_string(i), "time instants must be strictly increasing");
                ok = false;
            }
        }
        g.instants = std::move(*list);
        return ok ? std::optional(g) : std::nullopt;
    }
    if (!j.is_object()) {
        ck.fail(ptr, "expected a list of instants or {start, step}");
        return std::nullopt;
    }
    ck.reject_unknown(j, ptr, {"start", "step"});
    if (!j.contains("start") || !j.contains("step")) {
        ck.fail(ptr, "uniform grids need both start and step");
        return std::nullopt;
    }
    g.start = ck.number(j["start"], ptr + "/start");
    g.step = ck.number(j["step"], ptr + "/step");
    if (!g.start || !g.step) return std::nullopt;
    if (!(*g.start >= 0.0)) ck.fail(ptr + "/start", "start must be nonnegative");
    if (!(*g.step > 0.0)) ck.fail(ptr + "/step", "step must be positive (instants must be distinct)");
    return g;
}

inline std::optional<StateSpec> parse_state(Checker &ck, const json &j) {
    StateSpec s;
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "random") s.kind = StateSpec::Kind::Random;
        else if (name == "maximally-mixed") s.kind = StateSpec::Kind::MaximallyMixed;
        else {
            ck.fail("/state", "unknown state '" + name + "' (expected random, maximally-mixed or {matrix})");
            return std::nullopt;
        }
        return s;
    }
    if (!j.is_object() || !j.contains("matrix")) {
        ck.fail("/state", "expected random, maximally-mixed or {\"matrix\": ...}");
        return std::nullopt;
    }
    ck.reject_unknown(j, "/state", {"matrix"});
    s.kind = StateSpec::Kind::Matrix;
    s.matrix = ck.cmatrix(j["matrix"], "/state/matrix");
    return s.matrix ? std::optional(s) : std::nullopt;
}

inline void parse_overrides(Checker &ck, const json &j, ExperimentConfig &cfg) {
    if (!j.is_object()) {
        ck.fail("/overrides", "expected an object keyed by 1-based outcome index");
        return;
    }
    for (const auto &[key, value] : j.items()) {
        const std::string ptr = "/overrides/" + pointer_token(key);
        std::size_t index = 0;
        const bool numeric = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (!numeric || key.size() > 9 || (index = std::stoul(key)) == 0) {
            ck.fail(ptr, "override keys must be 1-based outcome indices");
            continue;
        }
        if (!value.is_object()) {
            ck.fail(ptr, "expected an object with z, eta and/or u_tilde");
            continue;
        }
        ck.reject_unknown(value, ptr, {"z", "eta", "u_tilde"});
        OverrideSpec o;
        if (value.contains("z")) o.z = ck.complex(value["z"], ptr + "/z");
        if (value.contains("eta")) o.eta = ck.complex(value["eta"], ptr + "/eta");
        if (value.contains("u_tilde")) o.u_tilde = ck.cvector(value["u_tilde"], ptr + "/u_tilde");
        cfg.overrides[index] = std::move(o);
    }
}

inline void check_invariants(Checker &ck, ExperimentConfig &cfg) {
    // Resolve the dimension from whatever fixes it.
    std::optional<std::size_t> implied;
    std::string implied_by;
    auto imply = [&](std::size_t d, std::string from) {
        if (implied && *implied != d) {
            ck.violate(from, "implies dimension " + std::to_string(d) + " but " + implied_by + " implies " +
                                 std::to_string(*implied));
            return;
        }
        implied = d;
        implied_by = std::move(from);
    };
    if (cfg.dimension) {
        implied = cfg.dimension;
        implied_by = "/dimension";
    }
    if (cfg.family && cfg.family->kind == FamilySpec::Kind::Example48) imply(3, "/family");
    if (cfg.family && cfg.family->kind == FamilySpec::Kind::Inline) {
        const std::size_t d = cfg.family->projectors.front().direction.size();
        for (std::size_t i = 0; i < cfg.family->projectors.size(); ++i) {
            const auto &p = cfg.family->projectors[i];
            const std::string ptr = "/family/projectors/" + std::to_string(i);
            if (p.direction.size() != d) ck.violate(ptr + "/1", "vector length differs from projector 0");
            if (!(p.weight > 0.0)) ck.violate(ptr + "/0", "weight must be positive");
        }
        imply(d, "/family/projectors/0/1");
    }
    if (cfg.fiducial) imply(cfg.fiducial->size(), "/fiducial");
    if (cfg.state && cfg.state->matrix) {
        const auto &m = *cfg.state->matrix;
        if (!m.is_square()) ck.violate("/state/matrix", "state matrix must be square");
        else imply(m.rows(), "/state/matrix");
    }
    if (implied) cfg.dimension = implied;

    const bool needs_dimension = cfg.protocol == Protocol::AvgChannel || cfg.protocol == Protocol::SicSimulate ||
                                 cfg.protocol == Protocol::WhDemo ||
                                 (cfg.family && (cfg.family->kind == FamilySpec::Kind::Random ||
                                                 cfg.family->kind == FamilySpec::Kind::Sic));
    if (needs_dimension && !cfg.dimension) ck.violate("/dimension", "dimension is required and cannot be inferred");
    if (cfg.dimension && *cfg.dimension < 2) ck.violate("/dimension", "dimension must be at least 2");
    if (!cfg.dimension || *cfg.dimension < 2) return;
    const std::size_t d = *cfg.dimension;
    const std::size_t d2 = d * d;

    if (cfg.family && cfg.family->kind == FamilySpec::Kind::Sic && d != 2 && d != 3 && !cfg.fiducial) {
        ck.violate("/family", "sic families need a fiducial for d other than 2 and 3");
    }
    if ((cfg.protocol == Protocol::AvgChannel || cfg.protocol == Protocol::SicSimulate) && d != 2 && d != 3 &&
        !cfg.fiducial) {
        ck.violate("/fiducial", "a fiducial (probe) vector is required for d other than 2 and 3");
    }

    if (cfg.protocol == Protocol::Rud && cfg.family) {
        const std::size_t x = *family_size(*cfg.family, d);
        if (x < d2) {
            ck.violate("/family", std::to_string(x) + " projectors at d = " + std::to_string(d) +
                                      " cannot be informationally complete (x >= d^2 required)");
        }
        if (cfg.outcome_index && *cfg.outcome_index > x) {
            ck.violate("/outcome_index", "outcome index exceeds the number of projectors");
        }
        for (const auto &[i, _] : cfg.overrides) {
            if (i > x) ck.violate("/overrides/" + std::to_string(i), "override index exceeds the number of projectors");
        }
        if (cfg.schedule && cfg.schedule->thetas && cfg.schedule->thetas->size() + 1 != x) {
            ck.violate("/schedule/thetas", "need x - 1 = " + std::to_string(x - 1) + " decay parameters");
        }
        if (cfg.schedule && cfg.schedule->gammas) ck.violate("/schedule/gammas", "the rud protocol takes thetas");
        if (cfg.grid && !cfg.grid->instants.empty() && cfg.grid->instants.size() != x) {
            ck.violate("/grid", "need x = " + std::to_string(x) + " time instants");
        }
    }
    if (cfg.protocol == Protocol::AvgChannel || cfg.protocol == Protocol::SicSimulate) {
        if (cfg.schedule && cfg.schedule->gammas && cfg.schedule->gammas->size() != d2) {
            ck.violate("/schedule/gammas", "need d^2 = " + std::to_string(d2) + " decay rates");
        }
        if (cfg.schedule && cfg.schedule->thetas) ck.violate("/schedule/thetas", "this protocol takes gammas");
        if (cfg.grid && !cfg.grid->instants.empty() && cfg.grid->instants.size() != d2) {
            ck.violate("/grid", "need d^2 = " + std::to_string(d2) + " time instants");
        }
    }
    if (cfg.fiducial && cfg.fiducial->size() != d) ck.violate("/fiducial", "fiducial must have length d");
    if (cfg.state && cfg.state->matrix && cfg.state->matrix->rows() != d) {
        ck.violate("/state/matrix", "state must be d x d");
    }
}

}  // namespace detail

/// Parses and validates a configuration document.
inline ExperimentConfig config_from_json(const json &doc) {
    detail::Checker ck;
    ExperimentConfig cfg;
    if (!doc.is_object()) throw ConfigError(ErrorCode::SchemaError, {{"", "configuration must be a JSON object"}});
    ck.reject_unknown(doc, "", {"protocol", "dimension", "family", "outcome_index", "schedule", "grid", "shots", "seed",
                                "overrides", "state", "fiducial", "output"});

    if (!doc.contains("protocol")) {
        ck.fail("/protocol", "missing required key");
    } else if (!doc["protocol"].is_string() || !parse_protocol(doc["protocol"].get<std::string>())) {
        ck.fail("/protocol", "expected one of rud, avgchannel, sic-simulate, ic-check, example-4-8, wh-demo");
    } else {
        cfg.protocol = *parse_protocol(doc["protocol"].get<std::string>());
    }
    if (doc.contains("dimension")) {
        if (const auto d = ck.uinteger(doc["dimension"], "/dimension")) cfg.dimension = static_cast<std::size_t>(*d);
    }
    if (doc.contains("family")) cfg.family = detail::parse_family(ck, doc["family"]);
    if (doc.contains("outcome_index")) {
        const auto j = ck.uinteger(doc["outcome_index"], "/outcome_index");
        if (j && *j == 0) ck.fail("/outcome_index", "outcome indices are 1-based");
        else if (j) cfg.outcome_index = static_cast<std::size_t>(*j);
    }
    if (doc.contains("schedule")) {
        const auto &s = doc["schedule"];
        if (!s.is_object()) {
            ck.fail("/schedule", "expected {\"thetas\": [...]} or {\"gammas\": [...]}");
        } else {
            ck.reject_unknown(s, "/schedule", {"thetas", "gammas"});
            ScheduleSpec spec;
            if (s.contains("thetas")) spec.thetas = ck.rlist(s["thetas"], "/schedule/thetas");
            if (s.contains("gammas")) spec.gammas = ck.rlist(s["gammas"], "/schedule/gammas");
            if (spec.thetas && spec.gammas) ck.fail("/schedule", "give thetas or gammas, not both");
            cfg.schedule = std::move(spec);
        }
    }
    if (doc.contains("grid")) cfg.grid = detail::parse_grid(ck, doc["grid"]);
    if (doc.contains("shots")) cfg.shots = ck.uinteger(doc["shots"], "/shots");
    if (doc.contains("seed")) cfg.seed = ck.uinteger(doc["seed"], "/seed");
    if (doc.contains("overrides")) detail::parse_overrides(ck, doc["overrides"], cfg);
    if (doc.contains("state")) cfg.state = detail::parse_state(ck, doc["state"]);
    if (doc.contains("fiducial")) cfg.fiducial = ck.cvector(doc["fiducial"], "/fiducial");
    if (doc.contains("output")) {
        const auto &o = doc["output"];
        if (!o.is_object()) {
            ck.fail("/output", "expected {\"json\": path, \"csv\": path}");
        } else {
            ck.reject_unknown(o, "/output", {"json", "csv"});
            for (const char *key : {"json", "csv"}) {
                if (!o.contains(key)) continue;
                if (!o[key].is_string() || o[key].get<std::string>().empty()) {
                    ck.fail(std::string("/output/") + key, "expected a nonempty path");
                } else {
                    (std::string_view(key) == "json" ? cfg.output.json : cfg.output.csv) = o[key].get<std::string>();
                }
            }
        }
    }
    const bool needs_family = cfg.protocol == Protocol::Rud || cfg.protocol == Protocol::IcCheck;
    if (needs_family && !doc.contains("family")) ck.fail("/family", "missing required key for this protocol");

    if (!ck.schema.empty()) throw ConfigError(ErrorCode::SchemaError, std::move(ck.schema));
    detail::check_invariants(ck, cfg);
    if (!ck.invariant.empty()) throw ConfigError(ErrorCode::InvariantError, std::move(ck.invariant));
    return cfg;
}

inline json parse_config_document(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

inline ExperimentConfig parse_config(std::string_view text) { return config_from_json(parse_config_document(text)); }

inline json read_config_document(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_document(text.str());
}

inline ExperimentConfig load_config(const std::string &path) { return config_from_json(read_config_document(path)); }

inline json config_to_json(const ExperimentConfig &cfg) {
    json out;
    out["protocol"] = std::string(protocol_name(cfg.protocol));
    if (cfg.dimension) out["dimension"] = *cfg.dimension;
    if (cfg.family) {
        const auto &f = *cfg.family;
        switch (f.kind) {
            case FamilySpec::Kind::Example48: out["family"] = "example-4-8"; break;
            case FamilySpec::Kind::Sic: out["family"] = "sic"; break;
            case FamilySpec::Kind::Random: {
                json r{{"builder", "random"}, {"count", f.count}};
                if (f.seed) r["seed"] = *f.seed;
                out["family"] = std::move(r);
                break;
            }
            case FamilySpec::Kind::Inline: {
                json list = json::array();
                for (const auto &p : f.projectors) list.push_back(json::array({p.weight, encode(p.direction)}));
                out["family"] = json{{"projectors", std::move(list)}};
                break;
            }
        }
    }
    if (cfg.outcome_index) out["outcome_index"] = *cfg.outcome_index;
    if (cfg.schedule) {
        json s = json::object();
        if (cfg.schedule->thetas) s["thetas"] = *cfg.schedule->thetas;
        if (cfg.schedule->gammas) s["gammas"] = *cfg.schedule->gammas;
        out["schedule"] = std::move(s);
    }
    if (cfg.grid) {
        if (cfg.grid->instants.empty()) out["grid"] = json{{"start", *cfg.grid->start}, {"step", *cfg.grid->step}};
        else out["grid"] = cfg.grid->instants;
    }
    if (cfg.shots) out["shots"] = *cfg.shots;
    if (cfg.seed) out["seed"] = *cfg.seed;
    if (!cfg.overrides.empty()) {
        json o = json::object();
        for (const auto &[i, spec] : cfg.overrides) {
            json e = json::object();
            if (spec.z) e["z"] = encode(*spec.z);
            if (spec.eta) e["eta"] = encode(*spec.eta);
            if (spec.u_tilde) e["u_tilde"] = encode(*spec.u_tilde);
            o[std::to_string(i)] = std::move(e);
        }
        out["overrides"] = std::move(o);
    }
    if (cfg.state) {
        switch (cfg.state->kind) {
            case StateSpec::Kind::Random: out["state"] = "random"; break;
            case StateSpec::Kind::MaximallyMixed: out["state"] = "maximally-mixed"; break;
            case StateSpec::Kind::Matrix: out["state"] = json{{"matrix", encode(*cfg.state->matrix)}}; break;
        }
    }
    if (cfg.fiducial) out["fiducial"] = encode(*cfg.fiducial);
    if (cfg.output.json || cfg.output.csv) {
        json o = json::object();
        if (cfg.output.json) o["json"] = *cfg.output.json;
        if (cfg.output.csv) o["csv"] = *cfg.output.csv;
        out["output"] = std::move(o);
    }
    return out;
}

}  // namespace dynatomo::cli
