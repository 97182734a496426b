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

#ifndef DRESSQ_TOOLS_RUNNER_H
#define DRESSQ_TOOLS_RUNNER_H

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "experiment/config.h"
#include "experiment/table.h"

namespace dressq::experiment {

using Logger = std::function<void(const std::string&)>;

struct RunOptions {
    bool write_files = true;
    Logger log;  // progress messages; may be empty
};

struct RunResult {
    ExperimentConfig config;  // resolved: truncation and drive frequency filled in
    std::map<std::string, Table> tables;  // keyed by file stem
    /// Scalar observables in insertion order. NaN when an analysis did not apply.
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0.0;

    double metric(const std::string& name) const;
};

/// Runs every requested analysis. `config` is resolved and validated first;
/// validation problems throw ConfigError and a truncation breach propagates
/// as dressq::TruncationBreach.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

struct SweepOptions {
    int jobs = 1;
    bool write_files = true;
    Logger log;
};

struct SweepResult {
    std::string axis;
    Table summary;
    std::vector<RunResult> points;  // in the order of the input values
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0.0;
};

/// One run per value with `axis` overridden. Points are independent and run
/// on `jobs` worker threads; results are merged in input order.
/// Throws ConfigError for an unknown axis or an empty value list.
SweepResult sweep(const ExperimentConfig& config, const std::string& axis, const std::vector<double>& values,
                  const SweepOptions& options = {});

/// Hex string of the truncation-independent physical parameter hash.
std::string params_hash_hex(const SystemParams& params);

/// Writes manifest.json into the config's output directory.
std::filesystem::path write_manifest(const RunResult& result);

}  // namespace dressq::experiment

#endif  // DRESSQ_TOOLS_RUNNER_H
