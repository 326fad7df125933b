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

// dynatomo: command line front end.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 golden mismatch.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dynatomo/cli/commands.hpp"
#include "dynatomo/cli/config.hpp"
#include "dynatomo/cli/report.hpp"

#ifndef DYNATOMO_GOLDEN_DIR
#define DYNATOMO_GOLDEN_DIR "data/golden"
#endif

namespace {

using namespace dynatomo;
using namespace dynatomo::cli;

struct GlobalFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::string out_dir = ".";
    bool json_only = false;
    std::string golden_dir = DYNATOMO_GOLDEN_DIR;
};

int finish(const CommandResult &result, const GlobalFlags &flags, const OutputSpec &names, double seconds) {
    const auto paths = emit_report(result, flags.out_dir, flags.json_only, names);
    if (flags.json_only) {
        std::cout << render_json(result.report);
    } else {
        for (const auto &line : result.summary) std::cout << line << "\n";
        std::cout << "report: " << paths.json.string() << "\n";
        if (paths.csv) std::cout << "probabilities: " << paths.csv->string() << "\n";
        std::cout << "wall clock: " << format_double(seconds) << " s\n";
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"dynatomo: dynamical quantum state tomography simulator"};
    app.require_subcommand(1);
    GlobalFlags flags;
    app.add_option("--seed", flags.seed, "master seed (overrides config and DYNATOMO_SEED)");
    app.add_option("--shots", flags.shots, "shots per time instant, 0 for exact probabilities");
    app.add_option("--out-dir", flags.out_dir, "directory for report files")->capture_default_str();
    app.add_flag("--json-only", flags.json_only, "write only the JSON report and print it to stdout");
    app.add_option("--golden-dir", flags.golden_dir, "directory holding golden files")->capture_default_str();

    std::string config_path;
    std::size_t wh_d = 0;
    std::size_t sic_d = 0;
    auto *run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config.json")->required();
    auto *ic = app.add_subcommand("ic-check", "check whether a projector family is informationally complete");
    ic->add_option("config", config_path, "config.json")->required();
    auto *sim = app.add_subcommand("sic-simulate", "simulate a SIC-POVM with one projector");
    sim->add_option("config", config_path, "config.json")->required();
    auto *ex = app.add_subcommand("example-4-8", "reproduce the worked qutrit example and diff it against golden data");
    auto *wh = app.add_subcommand("wh-demo", "verify the Weyl-Heisenberg identities");
    wh->add_option("--d", wh_d, "dimension")->required()->check(CLI::Range(2, 64));
    auto *sv = app.add_subcommand("sic-verify", "verify a built-in SIC fiducial");
    sv->add_option("--d", sic_d, "dimension")->required()->check(CLI::IsMember({2, 3}));
    for (auto *sub : {run, ic, sim, ex, wh, sv}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    RunOptions opts;
    opts.seed = flags.seed;
    opts.shots = flags.shots;
    opts.golden_dir = flags.golden_dir;
    if (const char *env = std::getenv("DYNATOMO_SEED"); env && *env) {
        opts.env_seed = parse_seed_text(env);
        if (!opts.env_seed) {
            std::cerr << "error: DYNATOMO_SEED must be a nonnegative 64-bit integer\n";
            return kExitConfig;
        }
    }

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    try {
        if (*run || *ic || *sim) {
            json doc = read_config_document(config_path);
            // ic-check and sic-simulate fix the protocol themselves.
            if (*ic && doc.is_object()) doc["protocol"] = protocol_name(Protocol::IcCheck);
            if (*sim && doc.is_object()) doc["protocol"] = protocol_name(Protocol::SicSimulate);
            const ExperimentConfig cfg = config_from_json(doc);
            const auto result = cmd_run(cfg, opts);
            return finish(result, flags, cfg.output, elapsed());
        }
        std::optional<CommandResult> result;
        if (*ex) result = cmd_example48(opts);
        if (*wh) result = cmd_wh_demo(wh_d, opts);
        if (*sv) result = cmd_sic_verify(sic_d);
        if (result) return finish(*result, flags, {}, elapsed());
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
