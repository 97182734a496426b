// Copyright 2026 The dressq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dressq: configuration-driven runner for the driven resonator-transmon
// simulations.
//
//   dressq run <config>
//   dressq sweep <config> --axis eps --values 0.01,0.02,0.03
//   dressq validate <config>
//   dressq cache build <config> | dressq cache clear <dir-or-config>
//
// Exit codes: 0 ok, 1 validation, 2 runtime error, 3 truncation breach.

#include <cstdio>
#include <algorithm>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dressq/basis_cache.h"
#include "dressq/propagate.h"
#include "experiment/config.h"
#include "experiment/runner.h"

namespace fs = std::filesystem;
using namespace dressq::experiment;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2, kBreach = 3 };

struct Overrides {
    std::string output_dir;
    std::string cache_dir;
};

ExperimentConfig load(const std::string& path, const Overrides& o) {
    ExperimentConfig c = load_config(path);
    if (!o.output_dir.empty()) c.output_dir = o.output_dir;
    if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
    return c;
}

// Comma-separated numbers; blank input gives an empty list.
bool parse_values(const std::string& text, std::vector<double>& out) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, end - pos);
        if (item.find_first_not_of(" \t") != std::string::npos) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (item.find_first_not_of(" \t", used) != std::string::npos) return false;
            } catch (const std::exception&) {
                return false;
            }
        }
        pos = end + 1;
    }
    return true;
}

void report(const ConfigError& e) {
    for (const auto& issue : e.issues()) std::fprintf(stderr, "error: %s\n", issue.str().c_str());
}

Logger stderr_logger(bool quiet) {
    if (quiet) return {};
    return [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };
}

int cmd_run(const std::string& path, const Overrides& o, bool quiet) {
    const RunResult r = run(load(path, o), RunOptions{true, stderr_logger(quiet)});
    for (const auto& f : r.files) std::printf("%s\n", f.string().c_str());
    std::fprintf(stderr, "%s: done in %.1f s\n", r.config.name.c_str(), r.wall_seconds);
    return kOk;
}

int cmd_sweep(const std::string& path, const Overrides& o, const std::string& axis, const std::vector<double>& values,
              int jobs, bool quiet) {
    SweepOptions so;
    so.jobs = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    so.log = stderr_logger(quiet);
    const SweepResult r = sweep(load(path, o), axis, values, so);
    for (const auto& f : r.files) std::printf("%s\n", f.string().c_str());
    std::fprintf(stderr, "sweep over %s: %zu points in %.1f s\n", axis.c_str(), r.points.size(), r.wall_seconds);
    return kOk;
}

int cmd_validate(const std::string& path, const Overrides& o) {
    const ExperimentConfig c = load(path, o);
    const auto issues = validate(c);
    if (issues.empty()) {
        const ExperimentConfig resolved = resolve(c);
        std::printf("ok: %s (N=%d, expected max n̄=%.1f)\n", c.name.c_str(), resolved.params.n_res,
                    expected_max_nbar(c));
        return kOk;
    }
    for (const auto& issue : issues) std::fprintf(stderr, "error: %s\n", issue.str().c_str());
    return kValidation;
}

int cmd_cache_build(const std::string& path, const Overrides& o) {
    const ExperimentConfig c = resolve(load(path, o));
    if (c.cache_dir.empty()) {
        std::fprintf(stderr, "error: no cache_dir configured (set it in the config or pass --cache-dir)\n");
        return kValidation;
    }
    dressq::cached_diagonalize(c.params, c.cache_dir);
    std::printf("%s\n", (c.cache_dir / dressq::basis_cache_name(c.params)).string().c_str());
    return kOk;
}

int cmd_cache_clear(const std::string& target, const Overrides& o) {
    fs::path dir = o.cache_dir;
    if (dir.empty()) dir = fs::is_directory(target) ? fs::path(target) : load(target, o).cache_dir;
    if (dir.empty() || !fs::is_directory(dir)) {
        std::fprintf(stderr, "error: no cache directory at '%s'\n", dir.string().c_str());
        return kValidation;
    }
    int removed = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("basis-", 0) == 0 && entry.path().extension() == ".bin") {
            fs::remove(entry.path());
            ++removed;
        }
    }
    std::printf("removed %d cached bases from %s\n", removed, dir.string().c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven resonator-transmon simulations and model comparisons"};
    app.require_subcommand(1);
    Overrides o;
    bool quiet = false;

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run every analysis listed in a scenario config");
    run_cmd->add_option("config", config_path, "scenario YAML")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Repeat a scenario over values of one parameter");
    std::string axis;
    std::string values_text;
    int jobs = 0;
    sweep_cmd->add_option("config", config_path, "scenario YAML")->required();
    sweep_cmd->add_option("--axis", axis, "parameter name (f_r, f_q, eta, g, e0, f_d, n_res, eps, phase, ramp_ns, t_end)")
        ->required();
    sweep_cmd->add_option("--values", values_text, "comma-separated values")->required();
    sweep_cmd->add_option("-j,--jobs", jobs, "worker threads (default: hardware concurrency)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
    validate_cmd->add_option("config", config_path, "scenario YAML")->required();

    auto* cache_cmd = app.add_subcommand("cache", "Manage cached dressed bases");
    cache_cmd->require_subcommand(1);
    auto* cache_build = cache_cmd->add_subcommand("build", "Diagonalize and store the basis for a config");
    cache_build->add_option("config", config_path, "scenario YAML")->required();
    std::string clear_target;
    auto* cache_clear = cache_cmd->add_subcommand("clear", "Delete cached bases");
    cache_clear->add_option("target", clear_target, "cache directory or scenario YAML");

    for (auto* sub : {run_cmd, sweep_cmd, validate_cmd, cache_build, cache_clear}) {
        sub->add_option("--cache-dir", o.cache_dir, "basis cache directory");
    }
    for (auto* sub : {run_cmd, sweep_cmd, validate_cmd}) {
        sub->add_option("-o,--output-dir", o.output_dir, "override the config's output_dir");
    }
    for (auto* sub : {run_cmd, sweep_cmd}) sub->add_flag("-q,--quiet", quiet, "no progress messages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (*run_cmd) return cmd_run(config_path, o, quiet);
        if (*sweep_cmd) {
            std::vector<double> values;
            if (!parse_values(values_text, values)) {
                std::fprintf(stderr, "error: --values: cannot parse '%s'\n", values_text.c_str());
                return kValidation;
            }
            return cmd_sweep(config_path, o, axis, values, jobs, quiet);
        }
        if (*validate_cmd) return cmd_validate(config_path, o);
        if (*cache_build) return cmd_cache_build(config_path, o);
        if (*cache_clear) {
            if (clear_target.empty() && o.cache_dir.empty()) {
                std::fprintf(stderr, "error: cache clear needs a directory, a config or --cache-dir\n");
                return kValidation;
            }
            return cmd_cache_clear(clear_target, o);
        }
    } catch (const ConfigError& e) {
        report(e);
        return kValidation;
    } catch (const dressq::TruncationBreach& e) {
        std::fprintf(stderr, "truncation breach: %s\n", e.what());
        return kBreach;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
    return kRuntime;
}
