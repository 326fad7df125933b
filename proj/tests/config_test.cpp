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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "dynatomo/cli/config.hpp"

using namespace dynatomo;
using namespace dynatomo::cli;

namespace {

ConfigError expect_config_error(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e;
    }
    ADD_FAILURE() << "no ConfigError for " << text;
    return ConfigError(ErrorCode::SchemaError, {});
}

bool names_pointer(const ConfigError &e, const std::string &prefix) {
    return std::any_of(e.violations().begin(), e.violations().end(),
                       [&](const Violation &v) { return v.pointer.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST(LoadConfig, NamedBuilderInfersDimension) {
    const auto cfg = parse_config(R"({"protocol": "rud", "family": "example-4-8"})");
    EXPECT_EQ(cfg.protocol, Protocol::Rud);
    ASSERT_TRUE(cfg.dimension);
    EXPECT_EQ(*cfg.dimension, 3u);
    EXPECT_EQ(cfg.family->kind, FamilySpec::Kind::Example48);
}

TEST(LoadConfig, DuplicateInstantsNameTheGrid) {
    const auto e = expect_config_error(
        R"({"protocol": "avgchannel", "dimension": 2, "grid": [0.1, 0.2, 0.2, 0.4]})");
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_TRUE(names_pointer(e, "/grid"));
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
}

TEST(LoadConfig, TooFewProjectorsIsAnInvariantError) {
    const auto e = expect_config_error(
        R"({"protocol": "rud", "dimension": 3, "family": {"builder": "random", "count": 8}})");
    EXPECT_EQ(e.code(), ErrorCode::InvariantError);
    EXPECT_TRUE(names_pointer(e, "/family"));
}

TEST(LoadConfig, UnknownKeysRejected) {
    const auto e = expect_config_error(R"({"protocol": "rud", "family": "example-4-8", "colour": "blue"})");
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_TRUE(names_pointer(e, "/colour"));
    const auto nested = expect_config_error(
        R"({"protocol": "rud", "dimension": 2, "family": {"builder": "random", "count": 4, "extra": 1}})");
    EXPECT_TRUE(names_pointer(nested, "/family/extra"));
}

TEST(LoadConfig, ListsEveryViolation) {
    const auto e = expect_config_error(R"({"protocol": "nope", "shots": -1, "seed": "x"})");
    EXPECT_GE(e.violations().size(), 3u);
    EXPECT_TRUE(names_pointer(e, "/protocol"));
    EXPECT_TRUE(names_pointer(e, "/shots"));
    EXPECT_TRUE(names_pointer(e, "/seed"));
}

TEST(LoadConfig, MalformedJsonIsParseError) {
    try {
        parse_config("{\"protocol\": ");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
}

TEST(LoadConfig, MissingFileIsIoError) {
    try {
        load_config("/nonexistent/dir/config.json");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}

TEST(LoadConfig, DimensionConflictDetected) {
    const auto e = expect_config_error(
        R"({"protocol": "rud", "dimension": 2, "family": "example-4-8"})");
    EXPECT_EQ(e.code(), ErrorCode::InvariantError);
}

TEST(LoadConfig, ScheduleLengthChecked) {
    const auto e = expect_config_error(
        R"({"protocol": "rud", "family": "example-4-8", "schedule": {"thetas": [1, 2, 3]}})");
    EXPECT_TRUE(names_pointer(e, "/schedule/thetas"));
    const auto g = expect_config_error(
        R"({"protocol": "avgchannel", "dimension": 2, "schedule": {"gammas": [1, 2]}})");
    EXPECT_TRUE(names_pointer(g, "/schedule/gammas"));
}

TEST(LoadConfig, OverridesAreOneBased) {
    const auto cfg = parse_config(
        R"({"protocol": "rud", "family": "example-4-8", "outcome_index": 7,
            "overrides": {"3": {"eta": [0.5, 0.8660254037844386]}}})");
    ASSERT_EQ(cfg.overrides.count(3), 1u);
    EXPECT_EQ(*cfg.outcome_index, 7u);
    const auto e = expect_config_error(
        R"({"protocol": "rud", "family": "example-4-8", "overrides": {"0": {"eta": [1, 0]}}})");
    EXPECT_TRUE(names_pointer(e, "/overrides/0"));
    const auto out_of_range = expect_config_error(
        R"({"protocol": "rud", "family": "example-4-8", "overrides": {"10": {"eta": [1, 0]}}})");
    EXPECT_EQ(out_of_range.code(), ErrorCode::InvariantError);
}

TEST(LoadConfig, FiducialRequiredBeyondThree) {
    const auto e = expect_config_error(R"({"protocol": "avgchannel", "dimension": 4})");
    EXPECT_TRUE(names_pointer(e, "/fiducial"));
}

TEST(ConfigRoundTrip, EmitThenLoadIsIdentity) {
    const char *texts[] = {
        R"({"protocol": "rud", "family": "example-4-8", "outcome_index": 7, "shots": 1000, "seed": 3,
            "overrides": {"3": {"eta": [0.5, 0.8660254037844386], "z": [1, 0]}},
            "schedule": {"thetas": [1, 2, 3, 4, 5, 6, 7, 8]}, "grid": {"start": 0.1, "step": 0.1},
            "state": "maximally-mixed", "output": {"json": "a.json", "csv": "a.csv"}})",
        R"({"protocol": "rud", "family": {"projectors": [[1, [[1, 0], [0, 0]]], [1, [[0, 0], [1, 0]]],
            [1, [[0.6, 0], [0.8, 0]]], [2, [[0.6, 0], [0, 0.8]]]]}, "grid": [0, 0.5, 1, 2]})",
        R"({"protocol": "avgchannel", "dimension": 2, "schedule": {"gammas": [1, 2, 3, 4]},
            "grid": [0.1, 0.2, 0.3, 0.4], "state": {"matrix": [[[0.5, 0], [0, 0.5]], [[0, -0.5], [0.5, 0]]]}})",
        R"({"protocol": "ic-check", "dimension": 3, "family": {"builder": "random", "count": 9, "seed": 4}})",
        R"({"protocol": "sic-simulate", "dimension": 3, "family": "sic", "fiducial": [[0, 0], [0.7071067811865476, 0], [-0.7071067811865476, 0]]})",
        R"({"protocol": "wh-demo", "dimension": 5, "seed": 18446744073709551615})",
    };
    for (const char *text : texts) {
        const auto cfg = parse_config(text);
        const auto again = config_from_json(config_to_json(cfg));
        EXPECT_EQ(cfg, again) << text;
        EXPECT_EQ(config_to_json(cfg), config_to_json(again));
    }
}

TEST(ConfigRoundTrip, ShippedConfigsLoad) {
    for (const auto &entry : std::filesystem::directory_iterator(DYNATOMO_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        const auto cfg = load_config(entry.path().string());
        EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg) << entry.path();
    }
}
