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

#ifndef DRESSQ_TOOLS_CONFIG_H
#define DRESSQ_TOOLS_CONFIG_H

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dressq/model.h"
#include "dressq/reduced.h"

namespace dressq::experiment {

enum class InitialKind { kBareGround, kEigen };
enum class Tuning { kResonant, kExplicit };

/// Analyses a run can emit. Each maps to one CSV file.
enum class Output {
    kTrajectory,  // norm, n̄, stray population, fidelities
    kLeakage,     // per-ladder stray populations with the perturbative model
    kFrequency,   // windowed oscillation frequency against the ladder detuning
    kDecay,       // oscillation amplitude envelope and its 1/3 crossing
    kShear,       // q|β|² estimates against the simulated infidelity
    kSqueeze,     // quadrature statistics over time
    kHusimi,      // Q function snapshots of the correct-ladder state and of the squeezed model
    kReduced,     // (β, K, W) trajectories of the reduced model
    kDss,         // squeezed vs coherent model infidelities
    kEntangle,    // product-state infidelity and entropy scans (no time evolution)
    kSpectrum,    // effective resonator frequency per ladder against n (no time evolution)
};

const char* output_name(Output o);
std::optional<Output> parse_output(const std::string& name);

struct EntangleScan {
    int n_min = 1;
    int n_max = 100;
    int step = 1;
};

struct ExperimentConfig {
    std::string name;
    std::filesystem::path source;  // file the config was read from, if any

    SystemParams params;
    bool auto_n_res = false;

    Tuning tuning = Tuning::kResonant;
    int tuning_ladder = 0;

    DriveEnvelope::Kind envelope_kind = DriveEnvelope::Kind::kSuddenConstant;
    double eps = 0.0;    // |ε|/2π, GHz
    double phase = 0.0;  // rad
    double ramp_ns = 0.0;
    std::vector<DriveEnvelope::Sample> table;

    InitialKind initial = InitialKind::kBareGround;
    int initial_ladder = 0;

    double t_end = 0.0;
    double dt_out = 0.5;
    double tol = 1e-10;

    std::vector<Output> outputs;
    std::vector<DriveMode> drive_modes{DriveMode::kAnalytic};
    double husimi_interval = 50.0;  // ns between Q snapshots
    int leakage_target = -1;  // ladder whose population the leakage summary tracks; -1 = neighbor above
    EntangleScan entangle;

    std::filesystem::path output_dir;
    std::filesystem::path cache_dir;

    DriveEnvelope envelope() const;
    bool wants(Output o) const;
    bool needs_simulation() const;
    /// Ladder the initial state lives on.
    int start_ladder() const { return initial == InitialKind::kBareGround ? 0 : initial_ladder; }
    int target_ladder() const { return leakage_target >= 0 ? leakage_target : start_ladder() + 1; }
};

/// One problem found while reading or validating a config.
struct ConfigIssue {
    std::string location;  // "file:line:col" or a field path
    std::string message;
    std::string str() const { return location.empty() ? message : location + ": " + message; }
};

class ConfigError : public std::runtime_error {
   public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

   private:
    std::vector<ConfigIssue> issues_;
};

/// Parses YAML text. Throws ConfigError listing every field that failed.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Photon number a resonant drive reaches by t_end, (2π|ε| t_end)².
double expected_max_nbar(const ExperimentConfig& config);

/// Smallest truncation accepted by validate for the expected photon number.
int required_n_res(const ExperimentConfig& config);

/// Checks parameter ranges, truncation headroom and the output directory.
/// Every check reports independently; an empty result means the config is ok.
std::vector<ConfigIssue> validate(const ExperimentConfig& config);

/// Fills derived fields: automatic truncation and resonant drive frequency.
ExperimentConfig resolve(ExperimentConfig config);

/// Sets a SystemParams or envelope field by name. Returns false for unknown axes.
bool set_axis(ExperimentConfig& config, const std::string& axis, double value);
std::vector<std::string> axis_names();

}  // namespace dressq::experiment

#endif  // DRESSQ_TOOLS_CONFIG_H
