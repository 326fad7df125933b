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

// Report files. Nothing time-dependent goes into them, so two runs with the
// same configuration and seed write identical bytes.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "dynatomo/cli/commands.hpp"
#include "dynatomo/cli/json_io.hpp"
#include "dynatomo/rud_tomography.hpp"

namespace dynatomo::cli {

inline std::string render_json(const json &report) { return report.dump(2) + "\n"; }

inline std::string render_csv(const std::optional<ProbabilityRecord> &rec) {
    std::string out = "t,p_exact,p_sampled,shots\n";
    if (!rec) return out;
    for (std::size_t i = 0; i < rec->grid.size(); ++i) {
        out += format_double(rec->grid[i]);
        out += ',';
        out += format_double(rec->exact[i]);
        out += ',';
        out += format_double(rec->values[i]);
        out += ',';
        out += std::to_string(rec->shots);
        out += '\n';
    }
    return out;
}

inline void write_file(const std::filesystem::path &path, const std::string &bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

struct EmittedPaths {
    std::filesystem::path json;
    std::optional<std::filesystem::path> csv;
};

/// Writes <out_dir>/<name>_report.json and, unless json_only, the
/// probability table <out_dir>/<name>_probabilities.csv. Paths from the
/// config's output block replace the default names; relative ones are taken
/// from out_dir.
inline EmittedPaths emit_report(const CommandResult &result, const std::filesystem::path &out_dir, bool json_only,
                                const OutputSpec &names = {}) {
    auto place = [&](const std::optional<std::string> &given, const std::string &fallback) {
        const std::filesystem::path p = given ? std::filesystem::path(*given) : std::filesystem::path(fallback);
        return p.is_absolute() ? p : out_dir / p;
    };
    EmittedPaths paths;
    paths.json = place(names.json, result.name + "_report.json");
    write_file(paths.json, render_json(result.report));
    if (!json_only && result.record) {
        paths.csv = place(names.csv, result.name + "_probabilities.csv");
        write_file(*paths.csv, render_csv(result.record));
    }
    return paths;
}

}  // namespace dynatomo::cli
