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

#include "experiment/config.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "dressq/spectrum.h"

namespace dressq::experiment {

namespace {

constexpr struct {
    Output output;
    const char* name;
} kOutputNames[] = {
    {Output::kTrajectory, "trajectory"}, {Output::kLeakage, "leakage"}, {Output::kFrequency, "frequency"},
    {Output::kDecay, "decay"},           {Output::kShear, "shear"},     {Output::kSqueeze, "squeeze"},
    {Output::kHusimi, "husimi"},         {Output::kReduced, "reduced"}, {Output::kDss, "dss"},
    {Output::kEntangle, "entangle"},     {Output::kSpectrum, "spectrum"},
};

std::string where(const std::filesystem::path& source, const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    std::string file = source.empty() ? "<config>" : source.string();
    if (mark.is_null()) return file;
    return file + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
}

// Collects every problem instead of stopping at the first one.
class Reader {
   public:
    explicit Reader(std::filesystem::path source) : source_(std::move(source)) {}

    void fail(const YAML::Node& node, const std::string& message) {
        issues_.push_back({where(source_, node), message});
    }

    void check_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) {
        for (const auto& kv : map) {
            const std::string key = kv.first.as<std::string>();
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
                allowed.end()) {
                fail(kv.first, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
            }
        }
    }

    template <typename T>
    void read(const YAML::Node& map, const char* key, T& out, const std::string& path) {
        const YAML::Node node = map[key];
        if (!node) return;
        try {
            out = node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, "cannot read '" + path + key + "' as " + type_name<T>());
        }
    }

    void require(const YAML::Node& map, const char* key, const std::string& path) {
        if (!map[key]) fail(map, "missing required key '" + path + key + "'");
    }

    std::vector<ConfigIssue> take() { return std::move(issues_); }

   private:
    template <typename T>
    static const char* type_name() {
        if constexpr (std::is_same_v<T, int>) return "an integer";
        if constexpr (std::is_same_v<T, double>) return "a number";
        return "a string";
    }

    std::filesystem::path source_;
    std::vector<ConfigIssue> issues_;
};

std::optional<DriveMode> parse_drive_mode(const std::string& name) {
    if (name == "bare") return DriveMode::kBare;
    if (name == "analytic") return DriveMode::kAnalytic;
    if (name == "matrix_element") return DriveMode::kMatrixElement;
    return std::nullopt;
}

}  // namespace

const char* output_name(Output o) {
    for (const auto& e : kOutputNames) {
        if (e.output == o) return e.name;
    }
    return "?";
}

std::optional<Output> parse_output(const std::string& name) {
    for (const auto& e : kOutputNames) {
        if (name == e.name) return e.output;
    }
    return std::nullopt;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
          std::string msg;
          for (const auto& i : issues) msg += (msg.empty() ? "" : "\n") + i.str();
          return msg;
      }()),
      issues_(std::move(issues)) {}

DriveEnvelope ExperimentConfig::envelope() const {
    const cplx eps_c = std::polar(eps, phase);
    switch (envelope_kind) {
        case DriveEnvelope::Kind::kSuddenConstant:
            return DriveEnvelope::sudden(eps_c);
        case DriveEnvelope::Kind::kLinearRamp:
            return DriveEnvelope::linear_ramp(eps_c, ramp_ns);
        case DriveEnvelope::Kind::kTabulated:
            return DriveEnvelope::tabulated(table);
    }
    return DriveEnvelope::sudden(eps_c);
}

bool ExperimentConfig::wants(Output o) const { return std::find(outputs.begin(), outputs.end(), o) != outputs.end(); }

bool ExperimentConfig::needs_simulation() const {
    return std::any_of(outputs.begin(), outputs.end(), [](Output o) {
        return o != Output::kEntangle && o != Output::kReduced && o != Output::kSpectrum;
    });
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::string loc = (source.empty() ? std::string("<config>") : source.string()) + ":" +
                          std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1);
        throw ConfigError({{loc, e.msg}});
    }
    if (!root.IsMap()) throw ConfigError({{where(source, root), "config must be a mapping"}});

    ExperimentConfig c;
    c.source = source;
    Reader r(source);
    r.check_keys(root, "",
                 {"name", "params", "drive", "envelope", "initial", "t_end", "dt_out", "tol", "outputs",
                  "output_dir", "cache_dir", "leakage_target", "husimi_interval", "drive_modes", "entangle"});
    r.require(root, "name", "");
    r.read(root, "name", c.name, "");

    if (const YAML::Node p = root["params"]) {
        r.check_keys(p, "params", {"f_r", "f_q", "eta", "g", "n_res", "e0"});
        r.read(p, "f_r", c.params.f_r, "params.");
        r.read(p, "f_q", c.params.f_q, "params.");
        r.read(p, "eta", c.params.eta, "params.");
        r.read(p, "g", c.params.g, "params.");
        r.read(p, "e0", c.params.e0, "params.");
        if (p["n_res"] && p["n_res"].IsScalar() && p["n_res"].Scalar() == "auto") {
            c.auto_n_res = true;
        } else {
            r.read(p, "n_res", c.params.n_res, "params.");
        }
    }

    if (const YAML::Node d = root["drive"]) {
        r.check_keys(d, "drive", {"tuning", "ladder", "f_d"});
        std::string tuning = "resonant";
        r.read(d, "tuning", tuning, "drive.");
        if (tuning == "resonant") {
            c.tuning = Tuning::kResonant;
        } else if (tuning == "explicit") {
            c.tuning = Tuning::kExplicit;
            r.require(d, "f_d", "drive.");
        } else {
            r.fail(d["tuning"], "drive.tuning must be 'resonant' or 'explicit'");
        }
        r.read(d, "ladder", c.tuning_ladder, "drive.");
        r.read(d, "f_d", c.params.f_d, "drive.");
    }

    if (const YAML::Node e = root["envelope"]) {
        r.check_keys(e, "envelope", {"kind", "eps", "phase", "ramp_ns", "table"});
        std::string kind = "sudden";
        r.read(e, "kind", kind, "envelope.");
        r.read(e, "eps", c.eps, "envelope.");
        r.read(e, "phase", c.phase, "envelope.");
        r.read(e, "ramp_ns", c.ramp_ns, "envelope.");
        if (kind == "sudden") {
            c.envelope_kind = DriveEnvelope::Kind::kSuddenConstant;
        } else if (kind == "ramp") {
            c.envelope_kind = DriveEnvelope::Kind::kLinearRamp;
            r.require(e, "ramp_ns", "envelope.");
        } else if (kind == "table") {
            c.envelope_kind = DriveEnvelope::Kind::kTabulated;
            const YAML::Node t = e["table"];
            if (!t || !t.IsSequence() || t.size() == 0) {
                r.fail(t ? t : e, "envelope.table must be a non-empty list of [t_ns, re, im]");
            } else {
                for (const auto& row : t) {
                    if (!row.IsSequence() || row.size() < 2 || row.size() > 3) {
                        r.fail(row, "table rows are [t_ns, re] or [t_ns, re, im]");
                        continue;
                    }
                    try {
                        const double im = row.size() == 3 ? row[2].as<double>() : 0.0;
                        c.table.push_back({row[0].as<double>(), cplx(row[1].as<double>(), im)});
                    } catch (const YAML::Exception&) {
                        r.fail(row, "table entries must be numbers");
                    }
                }
            }
        } else {
            r.fail(e["kind"], "envelope.kind must be 'sudden', 'ramp' or 'table'");
        }
    }

    if (const YAML::Node i = root["initial"]) {
        r.check_keys(i, "initial", {"kind", "k"});
        std::string kind = "bare_ground";
        r.read(i, "kind", kind, "initial.");
        r.read(i, "k", c.initial_ladder, "initial.");
        if (kind == "bare_ground") {
            c.initial = InitialKind::kBareGround;
        } else if (kind == "eigen") {
            c.initial = InitialKind::kEigen;
        } else {
            r.fail(i["kind"], "initial.kind must be 'bare_ground' or 'eigen'");
        }
    }

    r.read(root, "t_end", c.t_end, "");
    r.read(root, "dt_out", c.dt_out, "");
    r.read(root, "tol", c.tol, "");
    r.read(root, "leakage_target", c.leakage_target, "");
    r.read(root, "husimi_interval", c.husimi_interval, "");

    std::string out_dir = c.name.empty() ? "out" : "out/" + c.name;
    r.read(root, "output_dir", out_dir, "");
    c.output_dir = out_dir;
    std::string cache_dir;
    r.read(root, "cache_dir", cache_dir, "");
    c.cache_dir = cache_dir;

    if (const YAML::Node o = root["outputs"]) {
        if (!o.IsSequence()) {
            r.fail(o, "outputs must be a list");
        } else {
            for (const auto& item : o) {
                const auto parsed = item.IsScalar() ? parse_output(item.Scalar()) : std::nullopt;
                if (!parsed) {
                    r.fail(item, "unknown output '" + (item.IsScalar() ? item.Scalar() : std::string("?")) + "'");
                } else if (!c.wants(*parsed)) {
                    c.outputs.push_back(*parsed);
                }
            }
        }
    } else {
        c.outputs = {Output::kTrajectory};
    }

    if (const YAML::Node m = root["drive_modes"]) {
        c.drive_modes.clear();
        if (!m.IsSequence()) {
            r.fail(m, "drive_modes must be a list");
        } else {
            for (const auto& item : m) {
                const auto parsed = item.IsScalar() ? parse_drive_mode(item.Scalar()) : std::nullopt;
                if (!parsed) {
                    r.fail(item, "drive mode must be 'bare', 'analytic' or 'matrix_element'");
                } else {
                    c.drive_modes.push_back(*parsed);
                }
            }
        }
    }

    if (const YAML::Node s = root["entangle"]) {
        r.check_keys(s, "entangle", {"n_min", "n_max", "step"});
        r.read(s, "n_min", c.entangle.n_min, "entangle.");
        r.read(s, "n_max", c.entangle.n_max, "entangle.");
        r.read(s, "step", c.entangle.step, "entangle.");
    }

    auto issues = r.take();
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{path.string(), "cannot open config file"}});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

double expected_max_nbar(const ExperimentConfig& config) {
    double eps = std::abs(config.eps);
    if (config.envelope_kind == DriveEnvelope::Kind::kTabulated) {
        eps = 0.0;
        for (const auto& s : config.table) eps = std::max(eps, std::abs(s.eps));
    }
    const double x = angular(eps) * config.t_end;
    return x * x;
}

int required_n_res(const ExperimentConfig& config) {
    const double nbar = std::max(expected_max_nbar(config), 0.0);
    return static_cast<int>(std::ceil(nbar + 6.0 * std::sqrt(nbar) + 10.0)) + 1;
}

namespace {

// Coherent states up to |α|² = n_max keep their 6σ tail inside the truncation.
int entangle_n_res(const ExperimentConfig& config) {
    const int n = config.entangle.n_max;
    return n + static_cast<int>(std::ceil(6.0 * std::sqrt(std::max(n, 0)))) + 40;
}

}  // namespace

std::vector<ConfigIssue> validate(const ExperimentConfig& config) {
    std::vector<ConfigIssue> issues;
    auto add = [&](const char* field, std::string msg) { issues.push_back({field, std::move(msg)}); };
    char buf[256];

    const SystemParams& p = config.params;
    if (!(p.f_r > 0)) add("params.f_r", "resonator frequency must be positive");
    if (!(p.f_q > 0)) add("params.f_q", "qubit frequency must be positive");
    if (p.f_q > 0 && !(p.f_r > p.f_q)) add("params.f_q", "qubit frequency must lie below the resonator frequency");
    if (!(p.eta > 0)) add("params.eta", "anharmonicity must be positive");
    if (!(p.g > 0)) add("params.g", "coupling must be positive");
    if (!std::isfinite(p.e0)) add("params.e0", "offset must be finite");
    if (config.tuning == Tuning::kExplicit && !(p.f_d > 0)) add("drive.f_d", "drive frequency must be positive");
    if (config.tuning_ladder < 0 || config.tuning_ladder >= kTransmonLevels - 1) {
        add("drive.ladder", "ladder must be in [0, 5]");
    }
    if (config.initial_ladder < 0 || config.initial_ladder >= kTransmonLevels - 1) {
        add("initial.k", "ladder must be in [0, 5]");
    }
    if (config.leakage_target >= kTransmonLevels) add("leakage_target", "ladder must be below 7");
    if (!(config.eps >= 0) || !std::isfinite(config.eps)) add("envelope.eps", "amplitude must be non-negative");
    if (config.envelope_kind == DriveEnvelope::Kind::kLinearRamp && !(config.ramp_ns > 0)) {
        add("envelope.ramp_ns", "ramp duration must be positive");
    }
    for (std::size_t i = 1; i < config.table.size(); ++i) {
        if (!(config.table[i].t_ns > config.table[i - 1].t_ns)) {
            add("envelope.table", "sample times must increase strictly");
            break;
        }
    }
    if (config.needs_simulation() || config.wants(Output::kReduced)) {
        if (!(config.t_end > 0)) add("t_end", "duration must be positive");
        if (!(config.dt_out > 0)) add("dt_out", "snapshot interval must be positive");
    }
    if (!(config.tol >= 1e-12 && config.tol <= 1e-6)) add("tol", "tolerance must lie in [1e-12, 1e-6]");
    if (config.outputs.empty()) add("outputs", "no outputs requested");
    if (config.wants(Output::kHusimi) && !(config.husimi_interval > 0)) {
        add("husimi_interval", "snapshot interval must be positive");
    }
    if (config.wants(Output::kEntangle)) {
        const auto& s = config.entangle;
        if (s.n_min < 0 || s.n_max < s.n_min || s.step <= 0) {
            add("entangle", "need 0 <= n_min <= n_max and step > 0");
        }
    }

    if (!config.auto_n_res) {
        if (p.n_res < 2) {
            add("params.n_res", "truncation must be at least 2");
        } else if (config.needs_simulation() || config.wants(Output::kReduced)) {
            const int need = required_n_res(config);
            if (p.n_res < need) {
                std::snprintf(buf, sizeof buf,
                              "truncation headroom: N=%d but expected n̄=%.1f needs N >= %d (n̄ + 6σ + 10)", p.n_res,
                              expected_max_nbar(config), need);
                add("params.n_res", buf);
            }
        }
        if (config.wants(Output::kEntangle) && p.n_res < entangle_n_res(config)) {
            std::snprintf(buf, sizeof buf, "entangle scan to n=%d needs N >= %d", config.entangle.n_max,
                          entangle_n_res(config));
            add("params.n_res", buf);
        }
    }

    std::error_code ec;
    std::filesystem::path dir = config.output_dir;
    while (!dir.empty() && !std::filesystem::exists(dir, ec)) {
        const auto parent = dir.parent_path();
        if (parent == dir) break;
        dir = parent;
    }
    if (dir.empty()) dir = ".";
    if (!std::filesystem::is_directory(dir, ec)) {
        add("output_dir", "'" + dir.string() + "' exists and is not a directory");
    } else {
        const auto probe = dir / ".dressq-write-probe";
        std::ofstream f(probe);
        if (!f) {
            add("output_dir", "'" + dir.string() + "' is not writable");
        } else {
            f.close();
            std::filesystem::remove(probe, ec);
        }
    }
    return issues;
}

ExperimentConfig resolve(ExperimentConfig config) {
    if (config.auto_n_res) {
        int n = required_n_res(config);
        if (config.wants(Output::kEntangle)) n = std::max(n, entangle_n_res(config));
        config.params.n_res = std::max(n, 20);
        config.auto_n_res = false;
    }
    if (config.tuning == Tuning::kResonant) {
        config.params.f_d = resonant_drive_frequency(config.params, config.tuning_ladder);
    }
    return config;
}

namespace {

constexpr const char* kAxes[] = {"f_r", "f_q", "eta", "g", "e0", "f_d", "n_res", "eps", "phase", "ramp_ns", "t_end"};

}  // namespace

std::vector<std::string> axis_names() { return {std::begin(kAxes), std::end(kAxes)}; }

bool set_axis(ExperimentConfig& config, const std::string& axis, double value) {
    SystemParams& p = config.params;
    if (axis == "f_r") {
        p.f_r = value;
    } else if (axis == "f_q") {
        p.f_q = value;
    } else if (axis == "eta") {
        p.eta = value;
    } else if (axis == "g") {
        p.g = value;
    } else if (axis == "e0") {
        p.e0 = value;
    } else if (axis == "f_d") {
        p.f_d = value;
        config.tuning = Tuning::kExplicit;
    } else if (axis == "n_res") {
        p.n_res = static_cast<int>(std::lround(value));
        config.auto_n_res = false;
    } else if (axis == "eps") {
        config.eps = value;
    } else if (axis == "phase") {
        config.phase = value;
    } else if (axis == "ramp_ns") {
        config.ramp_ns = value;
    } else if (axis == "t_end") {
        config.t_end = value;
    } else {
        return false;
    }
    return true;
}

}  // namespace dressq::experiment
